#pragma once

// Globally adaptive Gauss–Kronrod (7/15) integration on an interval. Used as a
// reference integrator, independent of the polar section rules.

#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace xfem3d1d {

template <typename Scalar>
struct AdaptiveResult {
  Scalar value{};
  Scalar error{};
  int intervals = 0;
};

template <typename Scalar, typename F>
AdaptiveResult<Scalar> integrate_adaptive(F&& f, Scalar a, Scalar b, Scalar rel_tol,
                                          Scalar abs_tol = Scalar(0), int max_intervals = 20000) {
  using std::abs;
  // Kronrod nodes on [-1, 1] (positive half, descending), Kronrod and Gauss weights.
  static const std::array<Scalar, 8> xk = {
      Scalar(0.991455371120812639206854697526329L), Scalar(0.949107912342758524526189684047851L),
      Scalar(0.864864423359769072789712788640926L), Scalar(0.741531185599394439863864773280788L),
      Scalar(0.586087235467691130294144845693013L), Scalar(0.405845151377397166906606412076961L),
      Scalar(0.207784955007898467600689403773245L), Scalar(0.000000000000000000000000000000000L)};
  static const std::array<Scalar, 8> wk = {
      Scalar(0.022935322010529224963732008058970L), Scalar(0.063092092629978553290700663189204L),
      Scalar(0.104790010322250183839876322541518L), Scalar(0.140653259715525918745189590510238L),
      Scalar(0.169004726639267902826583426598550L), Scalar(0.190350578064785409913256402421014L),
      Scalar(0.204432940075298892414161999234649L), Scalar(0.209482141084727828012999174891714L)};
  static const std::array<Scalar, 4> wg = {
      Scalar(0.129484966168869693270611432679082L), Scalar(0.279705391489276667901467771423780L),
      Scalar(0.381830050505118944950369775488975L), Scalar(0.417959183673469387755102040816327L)};

  struct Piece {
    Scalar a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  const auto eval = [&](Scalar lo, Scalar hi) {
    const Scalar c = (lo + hi) / 2, h = (hi - lo) / 2;
    Scalar kr = wk[7] * f(c);
    Scalar ga = wg[3] * f(c);
    for (int j = 0; j < 7; ++j) {
      const Scalar s = f(c - h * xk[j]) + f(c + h * xk[j]);
      kr += wk[j] * s;
      if (j % 2 == 1) ga += wg[j / 2] * s;
    }
    return Piece{lo, hi, kr * h, abs((kr - ga) * h)};
  };

  std::priority_queue<Piece> heap;
  Piece first = eval(a, b);
  heap.push(first);
  Scalar total = first.value, err = first.error;
  int count = 1;
  while (err > std::max(abs_tol, rel_tol * abs(total))) {
    if (count >= max_intervals) throw std::runtime_error("integrate_adaptive: no convergence");
    const Piece worst = heap.top();
    heap.pop();
    const Scalar mid = (worst.a + worst.b) / 2;
    const Piece left = eval(worst.a, mid), right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
    // Recompute sums periodically to avoid drift from the running updates.
    if (count % 64 == 0) {
      auto copy = heap;
      total = Scalar(0);
      err = Scalar(0);
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, err, count};
}

}  // namespace xfem3d1d
