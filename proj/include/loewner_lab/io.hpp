#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "loewner_lab/loewner.hpp"
#include "loewner_lab/multichord.hpp"
#include "loewner_lab/rational.hpp"

namespace llab::io {

using nlohmann::json;

json curve_to_json(const Curve& c);        // {"points": [[re, im], ...]}
Curve curve_from_json(const json& j);
json driver_to_json(const loewner::DrivingFunction& w);  // {"times": [...], "values": [...]}
loewner::DrivingFunction driver_from_json(const json& j);
json multichord_to_json(const multichord::Multichord& mc);  // {"x", "pattern": [[a, b], ...], "chords"}
multichord::Multichord multichord_from_json(const json& j);
json rational_to_json(const multichord::RationalFn& f);

/// Parses text; malformed input throws InputError naming the line and column.
json parse_json(const std::string& text, const std::string& origin = "input");
json read_json_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Shortest text that reads back to the same double, '.' separator.
std::string fmt(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(const std::vector<double>& row);
    /// `comment`, if set, goes first as "# comment".
    std::string str(const std::string& comment = {}) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

/// Multichords (chords colored by pair index, faces lightly shaded) or loose curves.
std::string svg_multichord(const multichord::Multichord& mc, const std::string& note = {});
std::string svg_curves(const std::vector<Curve>& curves, const std::string& note = {});

/// Lowercase hex SHA-1.
std::string sha1_hex(const std::string& data);

}  // namespace llab::io
