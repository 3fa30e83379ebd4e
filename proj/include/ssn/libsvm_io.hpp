#ifndef SSN_LIBSVM_IO_HPP
#define SSN_LIBSVM_IO_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ssn/error.hpp"
#include "ssn/sparse.hpp"

namespace ssn {

/// A labelled sample set.  Labels are reals for both tasks; whether they are
/// class labels is decided by the Problem that consumes the data.
struct Dataset {
  SparseMatrix x;
  std::vector<double> y;
  bool bias_appended = false;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t feature_count() const noexcept { return x.cols(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

namespace detail {

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

inline bool parse_index(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

inline std::string format_double(double v) {
  char buf[32];
  int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

}  // namespace detail

/// Reads LIBSVM text: `<label> <idx>:<val> ...` with 1-based, strictly
/// increasing indices.  Blank lines are skipped; `#` comments are rejected.
/// The feature count is max(largest index seen, min_features).
inline Dataset parse_libsvm(std::istream& in, std::size_t min_features = 0) {
  std::vector<std::vector<Entry>> rows;
  std::vector<double> labels;
  std::size_t max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find('#') != std::string::npos)
      throw ParseError(lineno, "comments are not supported");
    std::string_view rest(line);
    auto next_token = [&rest]() -> std::string_view {
      std::size_t b = rest.find_first_not_of(" \t");
      if (b == std::string_view::npos) {
        rest = {};
        return {};
      }
      std::size_t e = rest.find_first_of(" \t", b);
      std::string_view tok = rest.substr(b, e == std::string_view::npos ? e : e - b);
      rest = e == std::string_view::npos ? std::string_view{} : rest.substr(e);
      return tok;
    };
    std::string_view tok = next_token();
    if (tok.empty()) continue;
    double label;
    if (!detail::parse_double(tok, label))
      throw ParseError(lineno, "bad label '" + std::string(tok) + "'");
    std::vector<Entry> row;
    std::uint64_t prev = 0;
    for (tok = next_token(); !tok.empty(); tok = next_token()) {
      std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError(lineno, "expected idx:val, got '" + std::string(tok) + "'");
      std::uint64_t idx;
      if (!detail::parse_index(tok.substr(0, colon), idx))
        throw ParseError(lineno, "bad index in '" + std::string(tok) + "'");
      if (idx == 0) throw ParseError(lineno, "indices are 1-based; got 0");
      if (idx <= prev)
        throw ParseError(lineno, "index " + std::to_string(idx) +
                                     " not strictly increasing");
      double val;
      if (!detail::parse_double(tok.substr(colon + 1), val))
        throw ParseError(lineno, "bad value in '" + std::string(tok) + "'");
      row.push_back({static_cast<std::size_t>(idx - 1), val});
      prev = idx;
    }
    max_index = std::max<std::size_t>(max_index, prev);
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  Dataset d;
  d.x = SparseMatrix::from_rows(rows, std::max(max_index, min_features));
  d.y = std::move(labels);
  return d;
}

inline Dataset parse_libsvm(std::string_view text, std::size_t min_features = 0) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in, min_features);
}

inline Dataset load_libsvm(const std::string& path, std::size_t min_features = 0) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return parse_libsvm(in, min_features);
  } catch (const ParseError& e) {
    throw ParseError(path, e);
  }
}

/// Writes LIBSVM text with 1-based indices and %.17g values, which
/// parse_libsvm reads back bit-for-bit.  Stored zeros are written as-is.
inline void write_libsvm(std::ostream& out, const Dataset& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << detail::format_double(d.y[i]);
    auto cols = d.x.row_cols(i);
    auto vals = d.x.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      out << ' ' << cols[k] + 1 << ':' << detail::format_double(vals[k]);
    out << '\n';
  }
}

inline std::string to_libsvm_string(const Dataset& d) {
  std::ostringstream out;
  write_libsvm(out, d);
  return out.str();
}

/// Maps the smaller of exactly two distinct label values to -1 and the
/// larger to +1.
inline Dataset remap_labels(Dataset d) {
  std::set<double> distinct(d.y.begin(), d.y.end());
  if (distinct.size() != 2)
    throw InvalidTaskError("binary classification needs exactly two distinct "
                           "labels, found " + std::to_string(distinct.size()));
  const double low = *distinct.begin();
  for (double& v : d.y) v = v == low ? -1.0 : 1.0;
  return d;
}

/// x_i <- [x_i, 1]: one trailing feature equal to 1 on every row.
inline Dataset append_bias(Dataset d) {
  if (d.bias_appended) throw UsageError("bias column already appended");
  const SparseMatrix& x = d.x;
  const std::size_t n_old = x.cols();
  std::vector<std::size_t> ptr(x.rows() + 1, 0);
  std::vector<std::size_t> idx;
  std::vector<double> val;
  idx.reserve(x.nnz() + x.rows());
  val.reserve(x.nnz() + x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = x.row_ptr()[i]; k < x.row_ptr()[i + 1]; ++k) {
      idx.push_back(x.col_idx()[k]);
      val.push_back(x.values()[k]);
    }
    idx.push_back(n_old);
    val.push_back(1.0);
    ptr[i + 1] = idx.size();
  }
  d.x = SparseMatrix(x.rows(), n_old + 1, std::move(ptr), std::move(idx),
                     std::move(val));
  d.bias_appended = true;
  return d;
}

/// Keeps the listed rows, in the given order.
inline Dataset select_rows(const Dataset& d, const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> ptr{0};
  std::vector<std::size_t> idx;
  std::vector<double> val;
  std::vector<double> y;
  for (std::size_t i : rows) {
    auto c = d.x.row_cols(i);
    auto v = d.x.row_values(i);
    idx.insert(idx.end(), c.begin(), c.end());
    val.insert(val.end(), v.begin(), v.end());
    ptr.push_back(idx.size());
    y.push_back(d.y[i]);
  }
  Dataset out;
  out.x = SparseMatrix(rows.size(), d.x.cols(), std::move(ptr), std::move(idx),
                       std::move(val));
  out.y = std::move(y);
  out.bias_appended = d.bias_appended;
  return out;
}

/// Result of fitting a dataset to a model's feature count.
struct AlignedDataset {
  Dataset data;
  std::size_t dropped_entries = 0;  // stored entries beyond the model's n
};

/// Re-dimensions raw (bias-free) test data to `n` features: columns >= n are
/// dropped, a narrower matrix is widened with implicit zeros.
inline AlignedDataset align_features(const Dataset& d, std::size_t n) {
  if (d.bias_appended)
    throw UsageError("align_features expects data without a bias column");
  AlignedDataset out;
  std::vector<std::vector<Entry>> rows(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto c = d.x.row_cols(i);
    auto v = d.x.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k] < n)
        rows[i].push_back({c[k], v[k]});
      else
        ++out.dropped_entries;
    }
  }
  out.data.x = SparseMatrix::from_rows(rows, n);
  out.data.y = d.y;
  return out;
}

struct SplitSpec {
  double train_fraction = 0.6;
  std::uint64_t seed = 0;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;  // original row indices, ascending
  std::vector<std::size_t> test_rows;
  std::vector<std::string> warnings;
};

namespace detail {

// Uniform integer in [0, bound) by rejection; the mapping from the
// mt19937_64 stream is fixed, so splits are identical across platforms.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

inline void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[bounded(rng, i)]);
}

}  // namespace detail

/// Seeded train/test partition.  With `stratify`, every distinct label value
/// is split separately, putting round(fraction * class size) of it in train;
/// otherwise the whole set is shuffled once and cut.
inline SplitResult stratified_split(const Dataset& d, const SplitSpec& spec,
                                    bool stratify = true) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw UsageError("train_fraction must lie in (0, 1)");
  std::mt19937_64 rng(spec.seed);
  SplitResult out;
  auto take = [&](std::vector<std::size_t> members, const std::string& name) {
    detail::shuffle(members, rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(members.size())));
    if (stratify && (n_train == 0 || n_train == members.size()))
      out.warnings.push_back("class " + name + " has " +
                             std::to_string(members.size()) +
                             " sample(s); one side of the split gets none");
    out.train_rows.insert(out.train_rows.end(), members.begin(),
                          members.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_rows.insert(out.test_rows.end(),
                         members.begin() + static_cast<std::ptrdiff_t>(n_train),
                         members.end());
  };
  if (stratify) {
    std::map<double, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < d.size(); ++i) classes[d.y[i]].push_back(i);
    for (auto& [label, members] : classes)
      take(std::move(members), detail::format_double(label));
  } else {
    std::vector<std::size_t> all(d.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    take(std::move(all), "");
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = select_rows(d, out.train_rows);
  out.test = select_rows(d, out.test_rows);
  return out;
}

}  // namespace ssn

#endif  // SSN_LIBSVM_IO_HPP
