#include "hyperstab/csv.hpp"

#include "hyperstab/error.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace hyperstab {

std::ostream& csv_precision(std::ostream& os) {
    os.unsetf(std::ios::floatfield);
    os.precision(17);
    return os;
}

namespace {

bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<double> read_samples_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open table " + path.string());
    std::vector<double> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::string_view view(line);
        const auto comma = view.rfind(',');
        const auto field = comma == std::string_view::npos ? view : view.substr(comma + 1);
        double v = 0.0;
        if (!parse_double(field, v)) {
            if (values.empty() && lineno == 1) continue;  // header
            throw Error(path.string() + ":" + std::to_string(lineno) + ": not a number");
        }
        values.push_back(v);
    }
    if (values.size() < 2) throw Error(path.string() + ": need at least 2 samples");
    return values;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    csv_precision(out);
    return out;
}

}  // namespace hyperstab
