#include "hlab/multi_index.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <utility>

#include "hlab/error.hpp"

namespace hlab {

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

// Number of m-tuples of non-negative integers summing to r.
std::size_t compositions(int m, int r) {
  if (r < 0) return 0;
  if (m == 0) return r == 0 ? 1 : 0;
  return binomial(static_cast<std::size_t>(r + m - 1), static_cast<std::size_t>(m - 1));
}

void emit_level(int dim, int axis, int remaining, std::vector<int>& current,
                std::vector<int>& flat) {
  if (axis == dim - 1) {
    current[static_cast<std::size_t>(axis)] = remaining;
    flat.insert(flat.end(), current.begin(), current.end());
    return;
  }
  for (int value = remaining; value >= 0; --value) {
    current[static_cast<std::size_t>(axis)] = value;
    emit_level(dim, axis + 1, remaining - value, current, flat);
  }
}

}  // namespace

MultiIndex::MultiIndex(std::initializer_list<int> entries)
    : MultiIndex(std::vector<int>(entries)) {}

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    require(e >= 0, ErrorCode::kInvalidArgument, "multi-index entries must be non-negative");
    order_ += e;
  }
}

MultiIndex::MultiIndex(std::span<const int> entries)
    : MultiIndex(std::vector<int>(entries.begin(), entries.end())) {}

MultiIndex MultiIndex::zero(int dim) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0)); }

MultiIndex MultiIndex::unit(int dim, int axis) {
  std::vector<int> e(static_cast<std::size_t>(dim), 0);
  e.at(static_cast<std::size_t>(axis)) = 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::raised(int axis) const {
  std::vector<int> e = entries_;
  e.at(static_cast<std::size_t>(axis)) += 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::lowered(int axis) const {
  std::vector<int> e = entries_;
  e.at(static_cast<std::size_t>(axis)) -= 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  require(dim() == other.dim(), ErrorCode::kDimensionMismatch, "multi-index dimensions differ");
  std::vector<int> e = entries_;
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.entries_[i];
  return MultiIndex(std::move(e));
}

std::string MultiIndex::to_string() const {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out << ',';
    out << entries_[i];
  }
  out << ')';
  return out.str();
}

std::size_t index_count(int dim, int degree) {
  if (degree < 0) return 0;
  return binomial(static_cast<std::size_t>(degree + dim), static_cast<std::size_t>(dim));
}

IndexSet::IndexSet(int dim, int degree)
    : dim_(dim), degree_(degree), size_(index_count(dim, degree)) {
  require(dim >= 1, ErrorCode::kInvalidArgument, "index set dimension must be >= 1");
  require(degree >= 0, ErrorCode::kInvalidArgument, "index set degree must be >= 0");
  flat_.reserve(size_ * static_cast<std::size_t>(dim));
  std::vector<int> current(static_cast<std::size_t>(dim), 0);
  for (int level = 0; level <= degree; ++level) {
    emit_level(dim, 0, level, current, flat_);
  }
  orders_.resize(size_);
  for (std::size_t p = 0; p < size_; ++p) {
    auto e = entries(p);
    orders_[p] = std::accumulate(e.begin(), e.end(), 0);
  }
}

std::shared_ptr<const IndexSet> IndexSet::shared(int dim, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const IndexSet>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{dim, degree}];
  if (!slot) slot = std::make_shared<const IndexSet>(dim, degree);
  return slot;
}

std::size_t IndexSet::level_begin(int level) const {
  if (level <= 0) return 0;
  return index_count(dim_, level - 1);
}

std::optional<std::size_t> IndexSet::position(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != dim_) return std::nullopt;
  int total = 0;
  for (int a : alpha) {
    if (a < 0) return std::nullopt;
    total += a;
  }
  if (total > degree_) return std::nullopt;
  // Count the indices of the same degree that precede α in descending lex order.
  std::size_t rank = 0;
  int remaining = total;
  for (int axis = 0; axis < dim_; ++axis) {
    const int a = alpha[static_cast<std::size_t>(axis)];
    for (int larger = a + 1; larger <= remaining; ++larger) {
      rank += compositions(dim_ - axis - 1, remaining - larger);
    }
    remaining -= a;
  }
  return level_begin(total) + rank;
}

}  // namespace hlab
