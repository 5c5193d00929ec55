#pragma once

#include <boost/rational.hpp>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsslab/rng.hpp"

namespace qsslab::codes {

class CodeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class DimensionTooLarge : public CodeError {
  using CodeError::CodeError;
};
class SearchExhausted : public CodeError {
  using CodeError::CodeError;
};
class NoSuchCodeword : public CodeError {
  using CodeError::CodeError;
};

using Rational = boost::rational<std::int64_t>;

inline constexpr int kMaxLength = 64;
inline constexpr int kMaxEnumerableDimension = 24;

/// n-bit word. Coordinate 1 is the most significant of the n bits, matching
/// the bitstring order of the code file format.
class Codeword {
 public:
  Codeword() = default;
  Codeword(int length, std::uint64_t bits);
  /// "0110..." with the first character as coordinate 1.
  static Codeword parse(std::string_view bits);

  int length() const { return length_; }
  std::uint64_t raw() const { return bits_; }
  /// Bit at zero-based coordinate i.
  int bit(int i) const { return static_cast<int>((bits_ >> (length_ - 1 - i)) & 1U); }
  int weight() const;
  std::string to_string() const;

  friend Codeword operator^(const Codeword& a, const Codeword& b);
  friend bool operator==(const Codeword&, const Codeword&) = default;
  friend auto operator<=>(const Codeword& a, const Codeword& b) { return a.bits_ <=> b.bits_; }

 private:
  int length_ = 0;
  std::uint64_t bits_ = 0;
};

inline int weight(const Codeword& word) { return word.weight(); }

/// Binary linear (n, k, d) code given by a full-rank generator matrix.
class LinearCode {
 public:
  /// Throws CodeError if rows are empty, of the wrong length or dependent.
  /// The minimum distance is computed by brute force; throws
  /// DimensionTooLarge past kMaxEnumerableDimension rows.
  static LinearCode from_generator(int length, std::vector<Codeword> rows);

  int length() const { return length_; }
  int dimension() const { return static_cast<int>(rows_.size()); }
  int min_distance() const { return min_distance_; }
  const std::vector<Codeword>& generator() const { return rows_; }

  friend bool operator==(const LinearCode&, const LinearCode&) = default;

 private:
  int length_ = 0;
  std::vector<Codeword> rows_;
  int min_distance_ = 0;
};

/// All 2^k codewords in ascending numeric order.
std::vector<Codeword> enumerate_codewords(const LinearCode& code);
/// Minimum weight over nonzero codewords.
int min_distance(const LinearCode& code);
bool is_codeword(const LinearCode& code, const Codeword& word);
std::vector<Codeword> weight_w_codewords(const LinearCode& code, int w);
Codeword sample_weight_w_codeword(const LinearCode& code, int w, Rng& rng);
/// Codewords agreeing with `prefix` on the first n - d coordinates.
/// Throws CodeError if prefix.size() != n - d.
std::vector<Codeword> complete_codeword(const LinearCode& code, const std::vector<int>& prefix);

// Parameter arithmetic, all exact -------------------------------------------

/// n * (1 - 4w^2 / (3n^2 - 2nw + 3w^2))
Rational distance_lower_bound(int n, int w);
/// 2 (n - w)
Rational distance_upper_bound(int n, int w);
/// lower < d < upper
bool validate_params(int n, int w, int d);
/// (1 - w^2/n^2)/4 + (1 - w/n)/2
Rational p1(int n, int w);
/// 1 - w^2/n^2
Rational p2(int n, int w);
/// (n - d) p1 + d p2
Rational n_prime(int n, int w, int d);

struct CodeParams {
  int n = 0;
  int w = 0;
  int d = 0;
  Rational lower;
  Rational upper;
  Rational p1;
  Rational p2;
  Rational n_prime;
  bool valid = false;
  /// w > 0.6 n
  bool weight_recommended = false;
};
CodeParams make_params(int n, int w, int d);

struct FoundCode {
  LinearCode code;
  CodeParams params;
};

/// Random search for a code whose distance satisfies validate_params and
/// which has at least `min_weight_w_words` codewords of weight w.
/// Throws SearchExhausted.
FoundCode find_code(int n, int w, Rng& rng, int max_tries, int min_weight_w_words = 3);

/// Code file: {"n", "k", "d", "w", "generator": ["0110...", ...]}
struct CodeFile {
  LinearCode code;
  int w = 0;
};
std::string code_file_json(const CodeFile& file);
CodeFile parse_code_file(std::string_view json_text);
CodeFile load_code_file(const std::filesystem::path& path);
void save_code_file(const std::filesystem::path& path, const CodeFile& file);

double to_double(const Rational& r);

}  // namespace qsslab::codes
