#include "mfp/fingerprint.hpp"

#include "mfp/error.hpp"
#include "mfp/text_format.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

namespace mfp {

namespace {

constexpr std::string_view format_tag = "mfp-fingerprint 1";

double block_norm(const std::vector<double>& v)
{
    double sum = 0.0;
    for (const double x : v) {
        sum += x * x;
    }
    return std::sqrt(sum);
}

void write_values(std::ostream& out, const std::vector<double>& values)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out << ' ';
        }
        out << format_real(values[i]);
    }
}

std::vector<double> parse_values(std::string_view text, const char* name)
{
    std::vector<double> out;
    for (const auto field : split_fields(text, " ")) {
        try {
            out.push_back(parse_real(field));
        } catch (const ParseError& e) {
            throw ParseError(std::string("fingerprint ") + name + ": " + e.what());
        }
    }
    return out;
}

} // namespace

std::vector<double> Fingerprint::concatenated() const
{
    std::vector<double> out(f_R);
    out.insert(out.end(), f_u.begin(), f_u.end());
    return out;
}

void check_layout(const Fingerprint& fp)
{
    if (fp.n_t < 0 || fp.n_u < 0) {
        throw LayoutError("fingerprint: negative n_t or n_u");
    }
    const auto n_t = static_cast<std::size_t>(fp.n_t);
    const auto n_u = static_cast<std::size_t>(fp.n_u);
    if (fp.f_R.size() != 2 * n_t) {
        throw LayoutError("fingerprint: f_R holds " + std::to_string(fp.f_R.size()) + " values, expected " +
                          std::to_string(2 * n_t));
    }
    if (fp.f_u.size() != 2 * n_u * n_t) {
        throw LayoutError("fingerprint: f_u holds " + std::to_string(fp.f_u.size()) + " values, expected " +
                          std::to_string(2 * n_u * n_t));
    }
    if (fp.valid_steps < 0 || fp.valid_steps > fp.n_t) {
        throw LayoutError("fingerprint: valid_steps " + std::to_string(fp.valid_steps) + " outside [0, n_t]");
    }
}

Fingerprint assemble(const SolutionSeries& series, const std::vector<std::vector<double>>& sampled, int n_u,
                     std::string descriptor_hash)
{
    if (n_u < 0) {
        throw LayoutError("assemble: negative n_u");
    }
    if (sampled.size() != series.steps.size()) {
        throw LayoutError("assemble: " + std::to_string(sampled.size()) + " sampled steps for a series of " +
                          std::to_string(series.steps.size()));
    }
    const std::size_t width = 2 * static_cast<std::size_t>(n_u);
    Fingerprint fp;
    fp.n_t = static_cast<int>(series.steps.size());
    fp.n_u = n_u;
    fp.valid_steps = series.last_converged_step;
    fp.descriptor_hash = std::move(descriptor_hash);
    fp.f_R.reserve(2 * series.steps.size());
    fp.f_u.reserve(width * series.steps.size());
    for (std::size_t k = 0; k < series.steps.size(); ++k) {
        if (sampled[k].size() != width) {
            throw LayoutError("assemble: step " + std::to_string(k + 1) + " has " + std::to_string(sampled[k].size()) +
                              " displacement values, expected " + std::to_string(width));
        }
        const bool valid = static_cast<int>(k) < fp.valid_steps;
        fp.f_R.push_back(valid ? quantize(series.steps[k].reaction_x) : 0.0);
        fp.f_R.push_back(valid ? quantize(series.steps[k].reaction_y) : 0.0);
        for (const double u : sampled[k]) {
            fp.f_u.push_back(valid ? quantize(u) : 0.0);
        }
    }
    return fp;
}

Fingerprint truncate(const Fingerprint& fp, int n_hat_t)
{
    if (n_hat_t < 1 || n_hat_t > fp.n_t) {
        throw ArgumentError("truncate: n_hat_t = " + std::to_string(n_hat_t) + " outside [1, " +
                            std::to_string(fp.n_t) + "]");
    }
    Fingerprint out;
    out.n_t = n_hat_t;
    out.n_u = fp.n_u;
    out.valid_steps = std::min(fp.valid_steps, n_hat_t);
    out.descriptor_hash = fp.descriptor_hash;
    const auto steps = static_cast<std::ptrdiff_t>(n_hat_t);
    out.f_R.assign(fp.f_R.begin(), fp.f_R.begin() + 2 * steps);
    out.f_u.assign(fp.f_u.begin(), fp.f_u.begin() + 2 * fp.n_u * steps);
    return out;
}

NormalizedBlocks normalize_blocks(const Fingerprint& fp)
{
    NormalizedBlocks out;
    out.norm_R = block_norm(fp.f_R);
    out.norm_u = block_norm(fp.f_u);
    if (!(out.norm_R > 0.0)) {
        throw DegenerateFingerprintError("fingerprint force block has zero norm");
    }
    if (!(out.norm_u > 0.0)) {
        throw DegenerateFingerprintError("fingerprint displacement block has zero norm");
    }
    out.unit_R.reserve(fp.f_R.size());
    out.unit_u.reserve(fp.f_u.size());
    for (const double v : fp.f_R) {
        out.unit_R.push_back(v / out.norm_R);
    }
    for (const double v : fp.f_u) {
        out.unit_u.push_back(v / out.norm_u);
    }
    return out;
}

Fingerprint scale_forces(const Fingerprint& fp, double a)
{
    Fingerprint out = fp;
    for (double& v : out.f_R) {
        v *= a;
    }
    return out;
}

void write_fingerprint(std::ostream& out, const Fingerprint& fp)
{
    check_layout(fp);
    out << "format = " << format_tag << '\n'
        << "layout = " << fingerprint_layout << '\n'
        << "n_t = " << fp.n_t << '\n'
        << "n_u = " << fp.n_u << '\n'
        << "valid_steps = " << fp.valid_steps << '\n'
        << "descriptor_hash = " << fp.descriptor_hash << '\n'
        << "f_R = ";
    write_values(out, fp.f_R);
    out << "\nf_u = ";
    write_values(out, fp.f_u);
    out << '\n';
}

std::string serialize(const Fingerprint& fp)
{
    std::ostringstream out;
    write_fingerprint(out, fp);
    return out.str();
}

Fingerprint parse_fingerprint(std::string_view text)
{
    std::map<std::string, std::string_view, std::less<>> kv;
    std::size_t line_no = 0;
    for (const auto line : split_exact(text, '\n')) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        std::string_view key;
        std::string_view value;
        if (!split_key_value(line, key, value)) {
            throw ParseError("fingerprint line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        kv[std::string(key)] = value;
    }
    auto require = [&](const char* key) {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            throw ParseError(std::string("fingerprint: missing key '") + key + "'");
        }
        return it->second;
    };
    if (require("format") != format_tag) {
        throw ParseError("fingerprint: unsupported format '" + std::string(require("format")) + "'");
    }
    if (require("layout") != fingerprint_layout) {
        throw ParseError("fingerprint: unsupported layout '" + std::string(require("layout")) + "'");
    }
    Fingerprint fp;
    fp.n_t = static_cast<int>(parse_integer(require("n_t")));
    fp.n_u = static_cast<int>(parse_integer(require("n_u")));
    fp.valid_steps = static_cast<int>(parse_integer(require("valid_steps")));
    fp.descriptor_hash = std::string(require("descriptor_hash"));
    fp.f_R = parse_values(require("f_R"), "f_R");
    fp.f_u = parse_values(require("f_u"), "f_u");
    check_layout(fp);
    return fp;
}

Fingerprint read_fingerprint_file(const std::string& path)
{
    return parse_fingerprint(read_file(path));
}

void write_fingerprint_file(const std::string& path, const Fingerprint& fp)
{
    write_file(path, serialize(fp));
}

} // namespace mfp
