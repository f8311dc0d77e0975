// Reverse Cuthill-McKee ordering and bandwidth of sparse matrices.

#ifndef RBFPU_ORDERING_HPP
#define RBFPU_ORDERING_HPP

#include <vector>

#include "rbfpu/rbf.hpp"

namespace rbfpu {

/// Symmetric RCM permutation of the pattern of A + A^T; perm[new] = old.
/// Each connected component starts from a pseudo-peripheral node.
std::vector<int> reverse_cuthill_mckee(const SparseMatrix& a);

/// max |i - j| over the stored entries.
int bandwidth(const SparseMatrix& a);

/// P A P^T for perm[new] = old.
SparseMatrix permute_symmetric(const SparseMatrix& a, const std::vector<int>& perm);

}  // namespace rbfpu

#endif  // RBFPU_ORDERING_HPP
