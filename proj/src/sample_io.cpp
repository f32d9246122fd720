#include <fstream>
#include <sstream>

#include "relearn/cube.hpp"
#include "relearn/errors.hpp"

namespace relearn {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return out;
}

int parse_sign(const std::string& cell, std::size_t row) {
  if (cell == "1" || cell == "+1") return 1;
  if (cell == "-1") return -1;
  throw InputError("row " + std::to_string(row) + ": expected -1 or +1, got '" + cell + "'");
}

}  // namespace

LabeledSample read_sample_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("sample CSV is empty (missing header)");
  const auto header = split_row(line);
  if (header.empty() || header.back() != "y") {
    throw InputError("sample CSV header must end with column 'y'");
  }
  const int n = static_cast<int>(header.size()) - 1;
  for (int i = 0; i < n; ++i) {
    if (header[static_cast<std::size_t>(i)] != "x" + std::to_string(i + 1)) {
      throw InputError("sample CSV header column " + std::to_string(i + 1) + " must be x" +
                       std::to_string(i + 1));
    }
  }
  LabeledSample s(n);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_row(line);
    if (static_cast<int>(cells.size()) != n + 1) {
      throw InputError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " columns, expected " + std::to_string(n + 1));
    }
    std::vector<std::int8_t> bits(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      bits[static_cast<std::size_t>(i)] =
          static_cast<std::int8_t>(parse_sign(cells[static_cast<std::size_t>(i)], row));
    }
    s.add(CubePoint(std::move(bits)), parse_sign(cells.back(), row));
  }
  return s;
}

LabeledSample read_sample_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sample file " + path);
  return read_sample_csv(in);
}

void write_sample_csv(std::ostream& out, const LabeledSample& s) {
  for (int i = 1; i <= s.n; ++i) out << 'x' << i << ',';
  out << "y\n";
  for (std::size_t r = 0; r < s.size(); ++r) {
    for (auto b : s.points[r].bits()) out << static_cast<int>(b) << ',';
    out << s.labels[r] << '\n';
  }
}

}  // namespace relearn
