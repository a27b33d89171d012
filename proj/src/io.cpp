#include "gtrans/io.hpp"

#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "gtrans/error.hpp"

namespace gtrans {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot open " + path + " for writing");
  out << text;
  if (!out) fail(ErrorKind::io, "failed writing " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_hfield_csv(const std::string& path, const SupportField& f) {
  std::string text = "# gauss-transport H-field v1, d=" + std::to_string(f.d) + ", R=" + format_double(f.R) +
                     ", r_stop=" + format_double(f.r_stop) + ", n_r=" + std::to_string(f.n_r) +
                     ", n_theta=" + std::to_string(f.n_theta) + "\n";
  text.reserve(text.size() + f.H.size() * 24);
  for (int k = 0; k <= f.n_r; ++k) {
    for (int j = 0; j < f.n_theta; ++j) {
      if (j > 0) text += ',';
      text += format_double(f.at(k, j));
    }
    text += '\n';
  }
  write_text(path, text);
}

SupportField read_hfield_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string header;
  std::getline(in, header);
  static const std::regex re(
      R"(^# gauss-transport H-field v1, d=(\d+), R=([^,]+), r_stop=([^,]+), n_r=(\d+), n_theta=(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(header, m, re)) fail(ErrorKind::io, path + ": not an H-field v1 file");
  SupportField f;
  try {
    f.d = std::stoi(m[1]);
    f.R = std::stod(m[2]);
    f.r_stop = std::stod(m[3]);
    f.n_r = std::stoi(m[4]);
    f.n_theta = std::stoi(m[5]);
  } catch (const std::exception&) {
    fail(ErrorKind::io, path + ": malformed header values");
  }
  if (f.n_r < 1 || f.n_theta < 1) fail(ErrorKind::io, path + ": bad grid sizes");
  f.H.reserve(static_cast<std::size_t>(f.n_r + 1) * f.n_theta);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) fail(ErrorKind::io, path + ": bad number '" + cell + "'");
      f.H.push_back(v);
      ++cols;
    }
    if (cols != f.n_theta) fail(ErrorKind::io, path + ": row " + std::to_string(rows) + " has " + std::to_string(cols) + " values");
    ++rows;
  }
  if (rows != f.n_r + 1) fail(ErrorKind::io, path + ": expected " + std::to_string(f.n_r + 1) + " rows");
  return f;
}

void write_points_csv(const std::string& path, const std::vector<Vec2>& points) {
  std::string text = "x,y\n";
  for (const Vec2& p : points) text += format_double(p.x) + "," + format_double(p.y) + "\n";
  write_text(path, text);
}

std::vector<Vec2> read_points_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<Vec2> out;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line == "x,y") {
      first = false;
      continue;
    }
    first = false;
    Vec2 p;
    char comma = 0;
    std::istringstream ls(line);
    if (!(ls >> p.x >> comma >> p.y) || comma != ',') fail(ErrorKind::io, path + ": bad point row '" + line + "'");
    out.push_back(p);
  }
  return out;
}

}  // namespace gtrans
