#pragma once

#include <string>
#include <vector>

#include "gtrans/pma.hpp"

namespace gtrans {

// "%.17g": enough digits for a bit-exact round trip.
std::string format_double(double x);

// H-field CSV: a header line followed by n_r + 1 rows of n_theta values.
void write_hfield_csv(const std::string& path, const SupportField& field);
// Parses the header and values; invariants are left to check_support_field.
SupportField read_hfield_csv(const std::string& path);

void write_points_csv(const std::string& path, const std::vector<Vec2>& points);
std::vector<Vec2> read_points_csv(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace gtrans
