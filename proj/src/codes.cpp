#include "qsslab/codes.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "qsslab/kernels.hpp"

namespace qsslab::codes {

namespace {

std::uint64_t mask_of(int n) { return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

// Row-reduced basis over GF(2), keyed by leading bit.
class Gf2Basis {
 public:
  /// Returns false if v is already in the span.
  bool insert(std::uint64_t v) {
    v = reduce(v);
    if (v == 0) return false;
    rows_.push_back(v);
    std::sort(rows_.begin(), rows_.end(), std::greater<>());
    return true;
  }
  std::uint64_t reduce(std::uint64_t v) const {
    for (std::uint64_t r : rows_) {
      const std::uint64_t lead = std::uint64_t{1} << (63 - std::countl_zero(r));
      if (v & lead) v ^= r;
    }
    return v;
  }

 private:
  std::vector<std::uint64_t> rows_;  // distinct leading bits, descending
};

std::vector<std::uint64_t> span_words(const std::vector<Codeword>& rows) {
  if (static_cast<int>(rows.size()) > kMaxEnumerableDimension) {
    throw DimensionTooLarge("dimension " + std::to_string(rows.size()) + " exceeds enumeration limit");
  }
  std::vector<std::uint64_t> words(std::size_t{1} << rows.size());
  // Gray-code walk: each step flips one generator row.
  std::uint64_t current = 0;
  words[0] = 0;
  for (std::size_t i = 1; i < words.size(); ++i) {
    current ^= rows[static_cast<std::size_t>(std::countr_zero(i))].raw();
    words[i] = current;
  }
  return words;
}

int min_nonzero_weight(std::span<const std::uint64_t> words) {
  kernels::WeightHistogram hist{};
  kernels::weight_histogram(words, hist);
  for (std::size_t w = 1; w < hist.size(); ++w) {
    if (hist[w] != 0) return static_cast<int>(w);
  }
  return 0;
}

Rational ratio(std::int64_t num, std::int64_t den) { return Rational(num, den); }

}  // namespace

Codeword::Codeword(int length, std::uint64_t bits) : length_(length), bits_(bits) {
  if (length < 0 || length > kMaxLength) throw CodeError("codeword length out of range");
  if ((bits & ~mask_of(length)) != 0 && length < 64) throw CodeError("codeword has bits beyond its length");
}

Codeword Codeword::parse(std::string_view bits) {
  std::uint64_t v = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw CodeError("bitstring may only contain 0 and 1");
    v = (v << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return Codeword(static_cast<int>(bits.size()), v);
}

int Codeword::weight() const { return std::popcount(bits_); }

std::string Codeword::to_string() const {
  std::string s(static_cast<std::size_t>(length_), '0');
  for (int i = 0; i < length_; ++i) s[static_cast<std::size_t>(i)] = bit(i) ? '1' : '0';
  return s;
}

Codeword operator^(const Codeword& a, const Codeword& b) {
  if (a.length_ != b.length_) throw CodeError("length mismatch");
  return Codeword(a.length_, a.bits_ ^ b.bits_);
}

LinearCode LinearCode::from_generator(int length, std::vector<Codeword> rows) {
  if (rows.empty()) throw CodeError("generator matrix has no rows");
  Gf2Basis basis;
  for (const auto& r : rows) {
    if (r.length() != length) throw CodeError("generator row length mismatch");
    if (!basis.insert(r.raw())) throw CodeError("generator rows are linearly dependent");
  }
  LinearCode code;
  code.length_ = length;
  code.rows_ = std::move(rows);
  code.min_distance_ = min_nonzero_weight(span_words(code.rows_));
  return code;
}

std::vector<Codeword> enumerate_codewords(const LinearCode& code) {
  auto words = span_words(code.generator());
  std::sort(words.begin(), words.end());
  std::vector<Codeword> out;
  out.reserve(words.size());
  for (auto w : words) out.emplace_back(code.length(), w);
  return out;
}

int min_distance(const LinearCode& code) { return min_nonzero_weight(span_words(code.generator())); }

bool is_codeword(const LinearCode& code, const Codeword& word) {
  if (word.length() != code.length()) throw CodeError("length mismatch");
  Gf2Basis basis;
  for (const auto& r : code.generator()) basis.insert(r.raw());
  return basis.reduce(word.raw()) == 0;
}

std::vector<Codeword> weight_w_codewords(const LinearCode& code, int w) {
  std::vector<Codeword> out;
  for (const auto& c : enumerate_codewords(code)) {
    if (c.weight() == w) out.push_back(c);
  }
  return out;
}

Codeword sample_weight_w_codeword(const LinearCode& code, int w, Rng& rng) {
  const auto candidates = weight_w_codewords(code, w);
  if (candidates.empty()) throw NoSuchCodeword("no codeword of weight " + std::to_string(w));
  return candidates[rng.below(candidates.size())];
}

std::vector<Codeword> complete_codeword(const LinearCode& code, const std::vector<int>& prefix) {
  const int keep = code.length() - code.min_distance();
  if (static_cast<int>(prefix.size()) != keep) {
    throw CodeError("prefix must cover the first n - d coordinates");
  }
  std::vector<Codeword> out;
  for (const auto& c : enumerate_codewords(code)) {
    bool match = true;
    for (int i = 0; i < keep && match; ++i) match = c.bit(i) == prefix[static_cast<std::size_t>(i)];
    if (match) out.push_back(c);
  }
  return out;
}

Rational distance_lower_bound(int n, int w) {
  const std::int64_t nn = n, ww = w;
  const std::int64_t den = 3 * nn * nn - 2 * nn * ww + 3 * ww * ww;
  return Rational(nn) * (Rational(1) - ratio(4 * ww * ww, den));
}

Rational distance_upper_bound(int n, int w) { return Rational(2 * (n - w)); }

bool validate_params(int n, int w, int d) {
  if (n < 1 || w < 0 || w > n || d < 1) return false;
  return distance_lower_bound(n, w) < Rational(d) && Rational(d) < distance_upper_bound(n, w);
}

Rational p1(int n, int w) {
  const Rational x = ratio(w, n);
  return (Rational(1) - x * x) / Rational(4) + (Rational(1) - x) / Rational(2);
}

Rational p2(int n, int w) {
  const Rational x = ratio(w, n);
  return Rational(1) - x * x;
}

Rational n_prime(int n, int w, int d) { return Rational(n - d) * p1(n, w) + Rational(d) * p2(n, w); }

CodeParams make_params(int n, int w, int d) {
  CodeParams p;
  p.n = n;
  p.w = w;
  p.d = d;
  p.lower = distance_lower_bound(n, w);
  p.upper = distance_upper_bound(n, w);
  p.p1 = codes::p1(n, w);
  p.p2 = codes::p2(n, w);
  p.n_prime = codes::n_prime(n, w, d);
  p.valid = validate_params(n, w, d);
  p.weight_recommended = Rational(w) > Rational(6 * n, 10);
  return p;
}

FoundCode find_code(int n, int w, Rng& rng, int max_tries, int min_weight_w_words) {
  if (n < 2 || n > 32) throw CodeError("code search supports 2 <= n <= 32");
  if (w < 1 || w > n) throw CodeError("weight must lie in [1, n]");
  // Smallest admissible integer distance must lie below the upper bound.
  const Rational lower = distance_lower_bound(n, w);
  const std::int64_t first_d = boost::rational_cast<std::int64_t>(lower) + 1;
  if (!(Rational(first_d) < distance_upper_bound(n, w))) {
    throw SearchExhausted("no integer distance satisfies the bounds for n=" + std::to_string(n) +
                          ", w=" + std::to_string(w));
  }
  const int k_max = std::max(2, n / 2);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    const int k = k_max - (attempt % (k_max - 1));
    // Rows are random weight-w words: full rank is checked, and the code then
    // contains at least k words of the weight the protocol needs.
    std::vector<Codeword> rows;
    Gf2Basis basis;
    bool independent = true;
    for (int r = 0; r < k && independent; ++r) {
      std::vector<int> coords(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = i;
      rng.shuffle(std::span<int>(coords));
      std::uint64_t v = 0;
      for (int i = 0; i < w; ++i) v |= std::uint64_t{1} << coords[static_cast<std::size_t>(i)];
      independent = basis.insert(v);
      rows.emplace_back(n, v);
    }
    if (!independent) continue;
    const auto words = span_words(rows);
    const int d = min_nonzero_weight(words);
    if (!validate_params(n, w, d)) continue;
    const auto count = std::count_if(words.begin(), words.end(),
                                     [w](std::uint64_t x) { return std::popcount(x) == w; });
    if (count < min_weight_w_words) continue;
    FoundCode found{LinearCode::from_generator(n, std::move(rows)), make_params(n, w, d)};
    return found;
  }
  throw SearchExhausted("no suitable code found in " + std::to_string(max_tries) + " tries");
}

std::string code_file_json(const CodeFile& file) {
  nlohmann::ordered_json j;
  j["n"] = file.code.length();
  j["k"] = file.code.dimension();
  j["d"] = file.code.min_distance();
  j["w"] = file.w;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : file.code.generator()) rows.push_back(r.to_string());
  j["generator"] = rows;
  return j.dump(2) + "\n";
}

CodeFile parse_code_file(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw CodeError(std::string("code file is not valid JSON: ") + e.what());
  }
  try {
    const int n = j.at("n").get<int>();
    std::vector<Codeword> rows;
    for (const auto& s : j.at("generator")) rows.push_back(Codeword::parse(s.get<std::string>()));
    CodeFile file{LinearCode::from_generator(n, std::move(rows)), j.at("w").get<int>()};
    if (j.contains("k") && j["k"].get<int>() != file.code.dimension()) {
      throw CodeError("declared k does not match the generator");
    }
    if (j.contains("d") && j["d"].get<int>() != file.code.min_distance()) {
      throw CodeError("declared d does not match the generator's minimum distance");
    }
    return file;
  } catch (const nlohmann::json::exception& e) {
    throw CodeError(std::string("malformed code file: ") + e.what());
  }
}

CodeFile load_code_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CodeError("cannot open code file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_code_file(ss.str());
}

void save_code_file(const std::filesystem::path& path, const CodeFile& file) {
  std::ofstream out(path);
  if (!out) throw CodeError("cannot write code file " + path.string());
  out << code_file_json(file);
}

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

}  // namespace qsslab::codes
