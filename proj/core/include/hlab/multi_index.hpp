#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hlab {

/// A multi-index α = (α_1, ..., α_n) of non-negative integers.
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> entries);
  explicit MultiIndex(std::vector<int> entries);
  explicit MultiIndex(std::span<const int> entries);

  static MultiIndex zero(int dim);
  static MultiIndex unit(int dim, int axis);

  int dim() const { return static_cast<int>(entries_.size()); }
  /// |α| = α_1 + ... + α_n
  int order() const { return order_; }

  int operator[](int axis) const { return entries_[static_cast<std::size_t>(axis)]; }
  std::span<const int> entries() const { return entries_; }

  /// α ± e_j; lowering an axis already at zero is a logic error.
  MultiIndex raised(int axis) const;
  MultiIndex lowered(int axis) const;

  MultiIndex operator+(const MultiIndex& other) const;
  bool operator==(const MultiIndex& other) const = default;

  std::string to_string() const;

 private:
  std::vector<int> entries_;
  int order_ = 0;
};

/// Number of multi-indices α ∈ ℕⁿ with |α| ≤ degree, i.e. C(degree + n, n).
std::size_t index_count(int dim, int degree);

/// The canonical enumeration of {α ∈ ℕⁿ : |α| ≤ N}: grouped by total degree,
/// and within one degree in descending lexicographic order, e.g. for n = 2:
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
///
/// Every coefficient vector and every matrix over E_N in the library uses this
/// ordering, so position lookups are shared through one cached instance per
/// (dim, degree).
class IndexSet {
 public:
  IndexSet(int dim, int degree);

  static std::shared_ptr<const IndexSet> shared(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return size_; }

  std::span<const int> entries(std::size_t position) const {
    return {flat_.data() + position * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  MultiIndex operator[](std::size_t position) const { return MultiIndex(entries(position)); }
  int order(std::size_t position) const { return orders_[position]; }

  /// Position of α in the enumeration; empty when |α| > degree or dims differ.
  std::optional<std::size_t> position(std::span<const int> alpha) const;
  std::optional<std::size_t> position(const MultiIndex& alpha) const {
    return position(alpha.entries());
  }

  /// First position of total degree `level` (level_begin(degree + 1) == size()).
  std::size_t level_begin(int level) const;

 private:
  int dim_;
  int degree_;
  std::size_t size_;
  std::vector<int> flat_;
  std::vector<int> orders_;
};

}  // namespace hlab
