#pragma once

#include <iosfwd>
#include <string>

#include "flexp2/synth.hpp"
#include "flexp2/tensor.hpp"

namespace flexp2 {

// P2RT v1, a line-oriented text format for ragged tensors. Bit-exact:
// every real is serialized with its shortest round-trip decimal form
// (at most 17 significant digits), fields separated by single spaces,
// LF line endings.
//
//   line 1:         "P2RT 1"
//   line 2:         "<n> <K>"
//   line 3:         "<m_1> ... <m_K>"
//   then per slice: n lines of m_k values
//
// Ground truth lives in a sibling file (suffix ".truth") made of labeled
// sections: "A <rows> <cols>" / "C <rows> <cols>" / "B1".."BK" followed by
// their rows, then "sigma <value>" and "seed <value>".

/// Shortest decimal form of x that parses back to the identical double.
std::string format_double(double x);

void write_p2rt(const RaggedTensor& tensor, std::ostream& out);
RaggedTensor read_p2rt(std::istream& in);

/// Convenience wrappers; throw IoError when the file cannot be opened.
void save_p2rt(const RaggedTensor& tensor, const std::string& path);
RaggedTensor load_p2rt(const std::string& path);

void write_truth(const SynthGroundTruth& truth, std::ostream& out);
SynthGroundTruth read_truth(std::istream& in);
void save_truth(const SynthGroundTruth& truth, const std::string& path);
SynthGroundTruth load_truth(const std::string& path);

/// One matrix as CSV: header col_1..col_r, LF endings, '.' decimal point.
void write_matrix_csv(const Matrix& m, const std::string& path);

}  // namespace flexp2
