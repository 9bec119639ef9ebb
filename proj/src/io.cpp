#include "flexp2/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "flexp2/errors.hpp"

namespace flexp2 {

namespace {

struct LineReader {
  std::istream& in;
  long line_no = 0;

  std::string next() {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("unexpected end of file", line_no);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }
};

double parse_double(const std::string& token, long line) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto result = std::from_chars(token.data(), end, value);
  if (result.ec != std::errc{} || result.ptr != end) throw ParseError("bad number '" + token + "'", line);
  return value;
}

long long parse_int(const std::string& token, long line) {
  long long value = 0;
  const auto* end = token.data() + token.size();
  const auto result = std::from_chars(token.data(), end, value);
  if (result.ec != std::errc{} || result.ptr != end) throw ParseError("bad integer '" + token + "'", line);
  return value;
}

std::uint64_t parse_u64(const std::string& token, long line) {
  std::uint64_t value = 0;
  const auto* end = token.data() + token.size();
  const auto result = std::from_chars(token.data(), end, value);
  if (result.ec != std::errc{} || result.ptr != end) throw ParseError("bad integer '" + token + "'", line);
  return value;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

void read_matrix_rows(LineReader& reader, Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    const long line_no = reader.line_no + 1;
    const auto tokens = split(reader.next());
    if (static_cast<Index>(tokens.size()) != m.cols())
      throw ParseError("expected " + std::to_string(m.cols()) + " values, got " + std::to_string(tokens.size()),
                       line_no);
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = parse_double(tokens[static_cast<std::size_t>(j)], line_no);
  }
}

void write_matrix_rows(const Matrix& m, std::ostream& out) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, result.ptr);
}

void write_p2rt(const RaggedTensor& tensor, std::ostream& out) {
  out << "P2RT 1\n" << tensor.n << ' ' << tensor.num_slices() << '\n';
  for (Index k = 0; k < tensor.num_slices(); ++k) {
    if (k > 0) out << ' ';
    out << tensor.width(k);
  }
  out << '\n';
  for (const auto& slice : tensor.slices) write_matrix_rows(slice, out);
}

RaggedTensor read_p2rt(std::istream& in) {
  LineReader reader{in};
  if (reader.next() != "P2RT 1") throw ParseError("missing P2RT 1 header", 1);

  auto header = split(reader.next());
  if (header.size() != 2) throw ParseError("expected '<n> <K>'", 2);
  const Index n = parse_int(header[0], 2);
  const Index K = parse_int(header[1], 2);
  if (n < 1 || K < 1) throw ParseError("dimensions must be positive", 2);

  const auto widths = split(reader.next());
  if (static_cast<Index>(widths.size()) != K) throw ParseError("expected " + std::to_string(K) + " slice widths", 3);

  std::vector<Matrix> slices;
  slices.reserve(widths.size());
  for (Index k = 0; k < K; ++k) {
    const Index m_k = parse_int(widths[static_cast<std::size_t>(k)], 3);
    if (m_k < 1) throw ParseError("slice widths must be positive", 3);
    Matrix slice(n, m_k);
    read_matrix_rows(reader, slice);
    slices.push_back(std::move(slice));
  }
  return RaggedTensor::from_slices(std::move(slices));
}

void save_p2rt(const RaggedTensor& tensor, const std::string& path) {
  auto out = open_out(path);
  write_p2rt(tensor, out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

RaggedTensor load_p2rt(const std::string& path) {
  auto in = open_in(path);
  return read_p2rt(in);
}

void write_truth(const SynthGroundTruth& truth, std::ostream& out) {
  out << "A " << truth.A.rows() << ' ' << truth.A.cols() << '\n';
  write_matrix_rows(truth.A, out);
  out << "C " << truth.C.rows() << ' ' << truth.C.cols() << '\n';
  write_matrix_rows(truth.C, out);
  for (std::size_t k = 0; k < truth.B.size(); ++k) {
    out << 'B' << (k + 1) << ' ' << truth.B[k].rows() << ' ' << truth.B[k].cols() << '\n';
    write_matrix_rows(truth.B[k], out);
  }
  out << "sigma " << format_double(truth.sigma) << '\n';
  out << "seed " << truth.seed << '\n';
}

SynthGroundTruth read_truth(std::istream& in) {
  LineReader reader{in};
  SynthGroundTruth truth;

  auto read_labeled_matrix = [&](const std::string& label, Matrix& m) {
    const long line_no = reader.line_no + 1;
    const auto tokens = split(reader.next());
    if (tokens.size() != 3 || tokens[0] != label) throw ParseError("expected section '" + label + "'", line_no);
    const Index rows = parse_int(tokens[1], line_no);
    const Index cols = parse_int(tokens[2], line_no);
    if (rows < 1 || cols < 1) throw ParseError("section dimensions must be positive", line_no);
    m.resize(rows, cols);
    read_matrix_rows(reader, m);
  };

  read_labeled_matrix("A", truth.A);
  read_labeled_matrix("C", truth.C);
  const Index K = truth.C.rows();
  truth.B.resize(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k)
    read_labeled_matrix("B" + std::to_string(k + 1), truth.B[static_cast<std::size_t>(k)]);

  long line_no = reader.line_no + 1;
  auto sigma_tokens = split(reader.next());
  if (sigma_tokens.size() != 2 || sigma_tokens[0] != "sigma") throw ParseError("expected 'sigma <value>'", line_no);
  truth.sigma = parse_double(sigma_tokens[1], line_no);

  line_no = reader.line_no + 1;
  auto seed_tokens = split(reader.next());
  if (seed_tokens.size() != 2 || seed_tokens[0] != "seed") throw ParseError("expected 'seed <value>'", line_no);
  truth.seed = parse_u64(seed_tokens[1], line_no);
  return truth;
}

void save_truth(const SynthGroundTruth& truth, const std::string& path) {
  auto out = open_out(path);
  write_truth(truth, out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

SynthGroundTruth load_truth(const std::string& path) {
  auto in = open_in(path);
  return read_truth(in);
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  auto out = open_out(path);
  for (Index j = 0; j < m.cols(); ++j) {
    if (j > 0) out << ',';
    out << "col_" << (j + 1);
  }
  out << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace flexp2
