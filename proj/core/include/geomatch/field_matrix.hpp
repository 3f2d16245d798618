#pragma once

#include <cstdint>
#include <vector>

#include "geomatch/modular.hpp"
#include "geomatch/ztree.hpp"

namespace geomatch {

// Dense row-major matrix over Z_p.
class FieldMatrix {
  public:
    FieldMatrix() : field_(3) {}
    FieldMatrix(std::size_t rows, std::size_t cols, const PrimeField& field)
        : rows_(rows), cols_(cols), field_(field), data_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const PrimeField& field() const { return field_; }

    std::uint64_t& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::uint64_t at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::uint64_t* row(std::size_t r) { return data_.data() + r * cols_; }
    const std::uint64_t* row(std::size_t r) const { return data_.data() + r * cols_; }

    bool operator==(const FieldMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && field_.p() == o.field_.p() &&
               data_ == o.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    PrimeField field_;
    std::vector<std::uint64_t> data_;
};

// Cache-blocked cubic product with delayed reduction.
FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b);

FieldMatrix transpose(const FieldMatrix& a);

// Rank by elimination with full pivoting (any nonzero survivor works over a
// field; the scan is deterministic).
std::size_t gauss_rank(FieldMatrix a);

// Elimination of the leading k rows without pivoting, yielding the block
// factorization
//   A = [ L        0 ] [ U  L^-1 A12            ]
//       [ A21 U^-1 I ] [ 0  A22 - A21 A11^-1 A12 ]
// Throws ZeroPivot if a diagonal pivot vanishes before step k.
struct PartialElimination {
    FieldMatrix L;      // k x k unit lower
    FieldMatrix U;      // k x k upper
    FieldMatrix below;  // (rows-k) x k,  A21 U^-1
    FieldMatrix right;  // k x (cols-k),  L^-1 A12
    FieldMatrix schur;  // (rows-k) x (cols-k)
};
PartialElimination partial_eliminate(const FieldMatrix& a, std::size_t k);

enum class ZeroPivotPolicy {
    Throw,
    // A vanishing pivot is checked to have an all-zero row and column inside
    // its working window and is skipped; used for rank-revealing elimination
    // of AA^T.  RankMismatch if the row or column is not null.
    DeleteRowCol,
};

struct NdOptions {
    ZeroPivotPolicy on_zero_pivot = ZeroPivotPolicy::Throw;
    // Eliminate only positions < eliminate_prefix (a partial elimination);
    // negative means eliminate everything.
    long long eliminate_prefix = -1;
    // Verify that, when a node is eliminated, every nonzero in its pivot rows
    // and columns lies inside the node's Z_t union B_t window.
    bool instrument = true;
};

struct NdStats {
    std::size_t locality_violations = 0;
    std::size_t nodes = 0;
    std::size_t max_window = 0;
};

struct NdResult {
    // In-place factor storage in permuted coordinates: multipliers below the
    // diagonal, U on and above.  Rows skipped by DeleteRowCol stay zero.
    FieldMatrix lu;
    std::vector<int> deleted;  // positions skipped under DeleteRowCol
    NdStats stats;
};

// Gaussian elimination of `a` (given already permuted so that row i is
// vertex order[i]) scheduled by the separator tree: each node eliminates its
// z-set touching only the Z_t union B_t window, where B_t holds the ancestor
// positions adjacent to the subtree in the nonzero pattern of `a`.
// Validates that `order` is consistent with the tree and that the pattern
// respects it (every off-diagonal nonzero joins an ancestor-descendant
// pair); throws InconsistentOrder otherwise.
NdResult nested_dissection_lu(const FieldMatrix& a, const ZTree& tree,
                              const std::vector<int>& order, const NdOptions& opts = {});

}  // namespace geomatch
