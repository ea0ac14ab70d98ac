#include "helmmg/matrix_market.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace helmmg {

void write_matrix_market(std::ostream& out, const CsrMatrix& m) {
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  out << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    const auto cols = m.row_cols(i);
    const auto vals = m.row_values(i);
    for (std::size_t p = 0; p < cols.size(); ++p)
      out << i + 1 << ' ' << cols[p] + 1 << ' ' << vals[p].real() << ' '
          << vals[p].imag() << '\n';
  }
}

void write_matrix_market(const std::string& path, const CsrMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_matrix_market(out, m);
}

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("matrix market: empty input");
  std::string lower = line;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower.rfind("%%matrixmarket", 0) != 0)
    throw Error("matrix market: missing %%MatrixMarket banner");
  if (lower.find("coordinate") == std::string::npos)
    throw Error("matrix market: only coordinate format is supported");
  if (lower.find("general") == std::string::npos)
    throw Error("matrix market: only general symmetry is supported");
  const bool is_complex = lower.find("complex") != std::string::npos;
  if (!is_complex && lower.find("real") == std::string::npos)
    throw Error("matrix market: field must be complex or real");

  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  Index rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream header(line);
    if (!(header >> rows >> cols >> nnz))
      throw Error("matrix market: malformed size line");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  for (Index k = 0; k < nnz; ++k) {
    if (!std::getline(in, line))
      throw Error("matrix market: expected " + std::to_string(nnz) +
                  " entries, found " + std::to_string(k));
    std::istringstream entry(line);
    Index r = 0, c = 0;
    double re = 0.0, im = 0.0;
    if (!(entry >> r >> c >> re) || (is_complex && !(entry >> im)))
      throw Error("matrix market: malformed entry on data line " +
                  std::to_string(k + 1));
    triplets.push_back({r - 1, c - 1, Complex(re, im)});
  }
  return CsrMatrix::from_triplets(rows, cols, std::move(triplets));
}

CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_matrix_market(in);
}

}  // namespace helmmg
