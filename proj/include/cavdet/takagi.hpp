#pragma once

#include "cavdet/types.hpp"

namespace cavdet {

struct TakagiFactorization {
    CMat v;         // unitary, columns are the Takagi vectors
    Vec values;     // nonnegative, descending
    double residual = 0.0;  // max abs entry of V diag(t) V^T - A
};

// Factor a complex symmetric matrix as A = V diag(t) V^T with V unitary and
// t >= 0. Works through the real symmetric embedding
//   T = [[Re A, Im A], [Im A, -Re A]],
// whose spectrum splits into +/- pairs: an eigenvector (x; y) of T with
// eigenvalue t > 0 encodes the Takagi vector v = x + iy, while (-y; x)
// carries -t and encodes i v. Taking the positive half therefore yields a
// complex-orthonormal set. In the kernel the pairing degenerates (v and iv
// both appear at eigenvalue 0), so zero modes are re-orthonormalized with a
// complex Gram-Schmidt pass before they are accepted.
//
// `pair_tol` decides which eigenvalues count as zero, relative to the
// largest magnitude. Throws std::runtime_error when the reconstruction
// residual ends up above residual_tol * max(1, |A|_max).
TakagiFactorization takagi(const CMat& a, double pair_tol = 1e-12,
                           double residual_tol = 1e-9);

}  // namespace cavdet
