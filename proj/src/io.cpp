#include "loewner_lab/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace llab::io {

namespace {

json pt(cplx z) {
    return json::array({z.real(), z.imag()});
}

cplx to_cplx(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError("expected a point [re, im], got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> numbers(const json& j, const char* what) {
    if (!j.is_array()) throw InputError(std::string(what) + " must be an array of numbers");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) throw InputError(std::string(what) + " must be an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

}  // namespace

json curve_to_json(const Curve& c) {
    json pts = json::array();
    for (cplx z : c.points) pts.push_back(pt(z));
    json j{{"points", pts}};
    if (!c.capacity_times.empty()) j["capacity_times"] = c.capacity_times;
    return j;
}

Curve curve_from_json(const json& j) {
    if (!j.is_object() || !j.contains("points")) throw InputError("curve JSON needs \"points\"");
    Curve c;
    for (const auto& p : j.at("points")) c.points.push_back(to_cplx(p));
    if (j.contains("capacity_times")) c.capacity_times = numbers(j.at("capacity_times"), "capacity_times");
    if (c.size() < 2) throw InputError("a curve needs at least two points");
    return c;
}

json driver_to_json(const loewner::DrivingFunction& w) {
    return {{"times", w.times()}, {"values", w.values()}};
}

loewner::DrivingFunction driver_from_json(const json& j) {
    if (!j.is_object() || !j.contains("times") || !j.contains("values")) throw InputError("driver JSON needs \"times\" and \"values\"");
    return {numbers(j.at("times"), "times"), numbers(j.at("values"), "values")};
}

json multichord_to_json(const multichord::Multichord& mc) {
    json pairs = json::array(), chords = json::array();
    for (const auto& [a, b] : mc.pattern.pairs) pairs.push_back({a, b});
    for (const auto& c : mc.chords) chords.push_back(curve_to_json(c).at("points"));
    return {{"x", mc.x}, {"pattern", pairs}, {"chords", chords}};
}

multichord::Multichord multichord_from_json(const json& j) {
    if (!j.is_object() || !j.contains("x") || !j.contains("pattern")) throw InputError("multichord JSON needs \"x\" and \"pattern\"");
    multichord::Multichord mc;
    mc.x = numbers(j.at("x"), "x");
    const json& p = j.at("pattern");
    if (p.is_string()) {
        mc.pattern = multichord::LinkPattern::parse(p.get<std::string>());
    } else {
        for (const auto& e : p) {
            if (!e.is_array() || e.size() != 2) throw InputError("pattern entries must be [a, b]");
            int a = e[0].get<int>(), b = e[1].get<int>();
            mc.pattern.pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(mc.pattern.pairs.begin(), mc.pattern.pairs.end());
    }
    multichord::validate_points(mc.x, mc.pattern);
    if (j.contains("chords")) {
        for (const auto& c : j.at("chords")) mc.chords.push_back(curve_from_json(json{{"points", c}}));
        if (mc.chords.size() != mc.pattern.n()) throw InputError("one chord per pair expected");
    }
    return mc;
}

json rational_to_json(const multichord::RationalFn& f) {
    return {{"p", f.p}, {"q", f.q}, {"normalization", f.normalization}};
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // byte is 1-based and points one past the offending character
        std::size_t at = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < at; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
    return parse_json(read_file(path), path.string());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
}

std::string fmt(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void CsvTable::add(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw std::logic_error("csv row width");
    rows_.push_back(row);
}

std::string CsvTable::str(const std::string& comment) const {
    std::string s;
    if (!comment.empty()) s += "# " + comment + "\n";
    for (std::size_t i = 0; i < header_.size(); ++i) s += (i ? "," : "") + header_[i];
    s += "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + fmt(r[i]);
        s += "\n";
    }
    return s;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct Frame {
    double x0, x1, y1, scale;

    std::string p(cplx z) const {
        return fmt((z.real() - x0) * scale) + "," + fmt((y1 - std::min(z.imag(), y1)) * scale);
    }
};

Frame frame(const std::vector<Curve>& curves, const std::vector<double>& x) {
    double x0 = 1e300, x1 = -1e300, y1 = 0.0;
    auto take = [&](cplx z) {
        if (is_infinite(z)) return;
        x0 = std::min(x0, z.real());
        x1 = std::max(x1, z.real());
        y1 = std::max(y1, z.imag());
    };
    for (const auto& c : curves)
        for (cplx z : c.points) take(z);
    for (double v : x) take({v, 0.0});
    if (x0 > x1) x0 = -1.0, x1 = 1.0;
    double pad = 0.08 * std::max(x1 - x0, 1e-9);
    x0 -= pad;
    x1 += pad;
    y1 = std::max(y1 + pad, 0.25 * (x1 - x0));
    return {x0, x1, y1, 800.0 / (x1 - x0)};
}

std::string header(const Frame& f, const std::string& note) {
    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" +
                    fmt(std::round(f.y1 * f.scale) + 20) + "\">\n";
    if (!note.empty()) s += "<!-- " + note + " -->\n";
    s += "<line x1=\"0\" y1=\"" + fmt(f.y1 * f.scale) + "\" x2=\"800\" y2=\"" + fmt(f.y1 * f.scale) +
         "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    return s;
}

std::string polyline(const Frame& f, const Curve& c, const char* color) {
    std::string s = "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
    for (cplx z : c.points)
        if (!is_infinite(z)) s += f.p(z) + " ";
    return s + "\"/>\n";
}

}  // namespace

std::string svg_multichord(const multichord::Multichord& mc, const std::string& note) {
    Frame f = frame(mc.chords, mc.x);
    std::string s = header(f, note);
    for (std::size_t j = 0; j < mc.chords.size(); ++j) {
        const char* col = kPalette[j % std::size(kPalette)];
        // face under the chord, closed along the real line
        std::string face = "<polygon fill=\"" + std::string(col) + "\" fill-opacity=\"0.08\" stroke=\"none\" points=\"";
        for (cplx z : mc.chords[j].points)
            if (!is_infinite(z)) face += f.p(z) + " ";
        s += face + "\"/>\n" + polyline(f, mc.chords[j], col);
    }
    for (std::size_t i = 0; i < mc.x.size(); ++i)
        s += "<circle cx=\"" + fmt((mc.x[i] - f.x0) * f.scale) + "\" cy=\"" + fmt(f.y1 * f.scale) + "\" r=\"3\" fill=\"#000\"/>\n";
    return s + "</svg>\n";
}

std::string svg_curves(const std::vector<Curve>& curves, const std::string& note) {
    Frame f = frame(curves, {});
    std::string s = header(f, note);
    for (std::size_t j = 0; j < curves.size(); ++j) s += polyline(f, curves[j], kPalette[j % std::size(kPalette)]);
    return s + "</svg>\n";
}

std::string sha1_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1) throw NumericalError("SHA-1 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

}  // namespace llab::io
