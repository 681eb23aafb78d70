#include "celearn/lp.hpp"

#include <cmath>
#include <cstring>

#include "celearn/kernels.hpp"

namespace celearn {

namespace {
constexpr double kCostTol = 1e-9;      // reduced cost this negative can enter
constexpr double kPivotAbs = 1e-11;    // absolute eligibility floor for pivots
constexpr double kPivotRel = 1e-9;     // floor relative to the row's own scale
constexpr double kFeasTol = 1e-7;      // residual infeasibility phase 1 accepts
constexpr double kSingularTol = 1e-12; // elimination pivot below this: singular
constexpr double kNoiseMargin = 100.0; // safety factor on the roundoff estimate
constexpr int kMaxPivots = 100000;     // safety net; lexicographic rule cannot cycle
constexpr int kMaxRebuilds = 16;       // refactorization attempts per attempt

// Internal signal: the tableau degraded past what refactorization can repair
// (dependent basis columns or a stall budget spent). The solve restarts once
// from the pristine data in a mode that refactorizes after every pivot; only
// a second occurrence surfaces to the caller.
struct NumericalTrouble {
  const char* what;
};
}  // namespace

LpResult SimplexSolver::solve(const LinearProgram& lp) {
  int n = lp.nvars;
  int m_le = static_cast<int>(lp.le_rows.size());
  int m_eq = static_cast<int>(lp.eq_rows.size());
  int m = m_le + m_eq;

  // Standard form: [vars | slacks | artificials | rhs]. Slack columns exist
  // for every <= row; artificials for eq rows and for <= rows whose rhs is
  // negative (their slack enters with -1 after sign normalization).
  int slack0 = n;
  int art0 = n + m_le;

  // First pass: which rows need artificials.
  std::vector<int> art_col(m, -1);
  int n_art = 0;
  for (int r = 0; r < m_le; ++r)
    if (lp.le_rhs[r] < 0.0) art_col[r] = art0 + n_art++;
  for (int r = 0; r < m_eq; ++r) art_col[m_le + r] = art0 + n_art++;

  int cols = art0 + n_art + 1;  // + rhs
  int rhs = cols - 1;
  tab_.assign(static_cast<std::size_t>(m + 1) * cols, 0.0);
  auto row = [&](int r) { return tab_.data() + static_cast<std::size_t>(r) * cols; };

  basis_.assign(m, -1);
  for (int r = 0; r < m; ++r) {
    double* t = row(r);
    bool le = r < m_le;
    const std::vector<double>& src = le ? lp.le_rows[r] : lp.eq_rows[r - m_le];
    double b = le ? lp.le_rhs[r] : lp.eq_rhs[r - m_le];
    if (static_cast<int>(src.size()) != n)
      throw DimensionMismatch("simplex: row width mismatch");
    // Equilibrate to unit max-norm so the numeric tolerances below mean the
    // same thing for every row regardless of the caller's units.
    double scale = 0.0;
    for (int c = 0; c < n; ++c) scale = std::max(scale, std::abs(src[c]));
    double sign = b < 0.0 ? -1.0 : 1.0;
    double f = scale > 0.0 ? sign / scale : sign;
    for (int c = 0; c < n; ++c) t[c] = f * src[c];
    t[rhs] = f * b;
    if (le) t[slack0 + r] = sign;
    if (art_col[r] >= 0) {
      t[art_col[r]] = 1.0;
      basis_[r] = art_col[r];
    } else {
      basis_[r] = slack0 + r;  // slack with +1 coefficient and b >= 0
    }
  }

  // Pristine copy of the constraint rows in standard form. Long degenerate
  // pivot chains (the CE feasibility rows all have zero rhs) accumulate
  // roundoff debris in tableau entries that are really zero; any terminal
  // verdict (optimal, infeasible, unbounded) is only trusted after the
  // tableau has been rebuilt from this copy under the current basis, which
  // wipes the debris.
  std::vector<double> base(tab_.begin(), tab_.begin() + static_cast<std::size_t>(m) * cols);
  auto base_row = [&](int r) { return base.data() + static_cast<std::size_t>(r) * cols; };
  std::vector<int> initial_basis(basis_);
  // Per-column magnitude of the pristine data and the overall scale, for the
  // column-relative noise model used by the retry attempt below.
  std::vector<double> base_colmax(static_cast<std::size_t>(cols), 0.0);
  double base_max = 0.0;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < cols; ++c) {
      double a = std::abs(base_row(r)[c]);
      base_colmax[c] = std::max(base_colmax[c], a);
      base_max = std::max(base_max, a);
    }
  if (base_max == 0.0) base_max = 1.0;
  // Largest tableau entry over the pristine scale, refreshed on rebuilds. It
  // approximates the norm of the basis inverse, which is what multiplies
  // machine epsilon in any error estimate for a refactorized tableau.
  double growth = 1.0;
  int pivots_since_rebuild = 0;
  int rebuilds = 0;
  bool paranoid = false;
  // Columns proven useless on a clean tableau: negative reduced cost but all
  // pivot entries positive yet below the noise floor. In exact arithmetic
  // such a column is zero (a rebuilt tableau is only accurate to roughly the
  // basis condition number times machine epsilon), so it cannot lead
  // anywhere; entering it would scale a row by 1e9 or more.
  std::vector<char> frozen(static_cast<std::size_t>(cols), 0);

  // Column order for lexicographic row comparisons: rhs first (the plain
  // ratio), then the columns of the initial basis. Artificials come before
  // slacks so that sign-flipped rows (negative rhs, slack coefficient -1,
  // artificial +1 basic) start lex-positive like everyone else.
  std::vector<int> lex_order;
  lex_order.reserve(1 + m + n_art);
  lex_order.push_back(rhs);
  for (int c = art0; c < art0 + n_art; ++c) lex_order.push_back(c);
  for (int c = slack0; c < art0; ++c) lex_order.push_back(c);

  int pivots = 0;
  double* obj = row(m);

  // A tableau entry only qualifies as a pivot when it clears both an absolute
  // floor and a floor relative to its row's current magnitude. Debris sits at
  // ~1e-16 of the row's scale, while genuine small entries pass. Pivoting on
  // debris would scale a row by its reciprocal and shred the tableau.
  auto row_floor = [&](int r) {
    const double* t = row(r);
    double norm = 0.0;
    for (int c = 0; c < rhs; ++c) norm = std::max(norm, std::abs(t[c]));
    return std::max(kPivotAbs, kPivotRel * norm);
  };

  // Eligibility floor for a pivot on column c of row r. The first attempt
  // compares against the row's scale, which catches debris smeared across a
  // long-unrefactorized row. The retry refactorizes after every pivot, where
  // that model misfires: a near-singular basis makes some rows huge and the
  // row floor then rejects genuine unit-size entries. Roundoff in a freshly
  // rebuilt column is bounded by machine epsilon times the tableau growth
  // times the column's pristine magnitude, so that product (with margin) is
  // the honest noise estimate there.
  auto pivot_floor = [&](int r, int c) {
    if (!paranoid) return row_floor(r);
    double noise = kNoiseMargin * (2.2e-16 * m) * growth * base_colmax[c];
    return std::max(kPivotAbs, noise);
  };

  // Gauss-Jordan with partial pivoting on the basis columns of the pristine
  // rows, applied simultaneously to the full pristine tableau. The combined
  // row operations equal multiplication by the basis inverse, so afterwards
  // the constraint rows are exactly the current-basis tableau, recomputed
  // from original data. Returns false when the basis matrix is singular.
  auto rebuild_from_basis = [&]() -> bool {
    std::vector<double> bmat(static_cast<std::size_t>(m) * m);
    for (int r = 0; r < m; ++r)
      for (int i = 0; i < m; ++i)
        bmat[static_cast<std::size_t>(r) * m + i] = base_row(r)[basis_[i]];
    std::vector<double> work(base);
    auto work_row = [&](int r) { return work.data() + static_cast<std::size_t>(r) * cols; };
    auto bmat_row = [&](int r) { return bmat.data() + static_cast<std::size_t>(r) * m; };
    for (int k = 0; k < m; ++k) {
      int p = k;
      for (int r = k + 1; r < m; ++r)
        if (std::abs(bmat_row(r)[k]) > std::abs(bmat_row(p)[k])) p = r;
      if (std::abs(bmat_row(p)[k]) < kSingularTol) return false;
      if (p != k) {
        for (int c = 0; c < m; ++c) std::swap(bmat_row(p)[c], bmat_row(k)[c]);
        for (int c = 0; c < cols; ++c) std::swap(work_row(p)[c], work_row(k)[c]);
      }
      double inv = 1.0 / bmat_row(k)[k];
      kernels::scale(bmat_row(k), inv, m);
      bmat_row(k)[k] = 1.0;
      kernels::scale(work_row(k), inv, cols);
      for (int r = 0; r < m; ++r) {
        if (r == k) continue;
        double f = bmat_row(r)[k];
        if (f == 0.0) continue;
        kernels::axpy(-f, bmat_row(k), bmat_row(r), m);
        bmat_row(r)[k] = 0.0;
        kernels::axpy(-f, work_row(k), work_row(r), cols);
      }
    }
    std::memcpy(tab_.data(), work.data(), sizeof(double) * work.size());
    for (int r = 0; r < m; ++r)  // exact identity on the basic columns
      for (int i = 0; i < m; ++i) row(r)[basis_[i]] = r == i ? 1.0 : 0.0;
    double tab_max = 0.0;
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < cols; ++c)
        tab_max = std::max(tab_max, std::abs(row(r)[c]));
    growth = std::max(1.0, tab_max / base_max);
    pivots_since_rebuild = 0;
    return true;
  };

  // Rebuild unless the tableau is already freshly rebuilt. The caller decides
  // what a clean-tableau verdict means; a singular basis or too many stalls
  // escalates to a restart of the whole solve.
  auto try_rebuild = [&]() -> bool {
    if (pivots_since_rebuild == 0) return false;
    if (++rebuilds > kMaxRebuilds)
      throw NumericalTrouble{"simplex: repeated numerical stalls"};
    if (!rebuild_from_basis())
      throw NumericalTrouble{"simplex: basis matrix is singular"};
    return true;
  };

  // In paranoid mode every pivot is immediately followed by a clean rebuild,
  // so debris never accumulates far enough to clear a pivot floor. This costs
  // a factor of the row count on the pivot loop and only runs on the retry.
  auto paranoid_rebuild = [&]() {
    if (!paranoid || pivots_since_rebuild == 0) return;
    if (!rebuild_from_basis())
      throw NumericalTrouble{"simplex: basis matrix is singular"};
  };

  enum class Step { kOptimal, kPivoted, kStuck };

  // One simplex iteration: Dantzig entering (most negative reduced cost,
  // lowest index on ties, frozen columns skipped), lexicographic min-ratio
  // leaving. The leaving rule keeps every row lex-positive and strictly
  // lex-decreases the objective row, so no basis can repeat even on fully
  // degenerate polytopes. Every row whose entry clears its floor takes part
  // in the ratio test; skipping one that held the minimum ratio would drive
  // its rhs negative and break that invariant. A negative-cost column with
  // no eligible row is reported as kStuck with the column in *stuck_col;
  // only the phase driver can tell (after a rebuild) whether that means an
  // unbounded direction or just debris.
  auto pivot_step = [&](int enter_limit, int* stuck_col) -> Step {
    int enter = -1;
    double best_cost = -kCostTol;
    for (int c = 0; c < enter_limit; ++c)
      if (!frozen[c] && obj[c] < best_cost) {
        best_cost = obj[c];
        enter = c;
      }
    if (enter < 0) return Step::kOptimal;

    int leave = -1;
    for (int r = 0; r < m; ++r) {
      double a = row(r)[enter];
      if (a <= pivot_floor(r, enter)) continue;
      if (leave < 0) {
        leave = r;
        continue;
      }
      // Lexicographic comparison of row r against the incumbent.
      double al = row(leave)[enter];
      for (int idx : lex_order) {
        double vr = row(r)[idx] / a;
        double vl = row(leave)[idx] / al;
        if (vr < vl) {
          leave = r;
          break;
        }
        if (vr > vl) break;
      }
    }
    if (leave < 0) {
      *stuck_col = enter;
      return Step::kStuck;
    }

    double* prow = row(leave);
    double inv = 1.0 / prow[enter];
    kernels::scale(prow, inv, cols);
    prow[enter] = 1.0;  // kill roundoff on the pivot itself
    for (int r = 0; r <= m; ++r) {
      if (r == leave) continue;
      double* t = row(r);
      double f = t[enter];
      if (f == 0.0) continue;
      kernels::axpy(-f, prow, t, cols);
      t[enter] = 0.0;
    }
    basis_[leave] = enter;
    ++pivots_since_rebuild;
    if (++pivots > kMaxPivots)
      throw NumericalTrouble{"simplex: pivot limit exceeded"};
    // Freezes describe the old basis; a pivot invalidates them.
    std::fill(frozen.begin(), frozen.end(), 0);
    return Step::kPivoted;
  };

  // A clean tableau is stuck on this column. Entries that are exactly
  // nonpositive describe a genuine unbounded ray; entries that are positive
  // but under the floor are roundoff of a zero column, so the column is
  // frozen and the scan moves on.
  auto column_is_ray = [&](int c) {
    for (int r = 0; r < m; ++r)
      if (row(r)[c] > 0.0) return false;
    return true;
  };

  auto set_phase1_obj = [&]() {
    // Reduced costs of the artificial-sum objective: minus the sum of the
    // rows whose basic variable is an artificial (at the start those are
    // exactly the rows that received one).
    std::memset(obj, 0, sizeof(double) * cols);
    for (int r = 0; r < m; ++r)
      if (basis_[r] >= art0) kernels::axpy(-1.0, row(r), obj, cols);
    for (int c = art0; c < art0 + n_art; ++c) obj[c] = 0.0;
  };

  auto set_phase2_obj = [&]() {
    std::memset(obj, 0, sizeof(double) * cols);
    for (int c = 0; c < n; ++c) obj[c] = -lp.objective[c];
    for (int r = 0; r < m; ++r) {
      if (basis_[r] >= n) continue;  // slacks and artificials cost nothing
      double cb = -lp.objective[basis_[r]];
      if (cb == 0.0) continue;
      kernels::axpy(-cb, row(r), obj, cols);
    }
    for (int r = 0; r < m; ++r) obj[basis_[r]] = 0.0;
  };

  auto run_phases = [&]() {
    if (n_art > 0) {
      // Phase 1: minimize the sum of artificials.
      set_phase1_obj();
      for (;;) {
        int stuck = -1;
        Step s = pivot_step(art0, &stuck);
        if (s == Step::kPivoted) {
          if (paranoid && pivots_since_rebuild > 0) {
            paranoid_rebuild();
            set_phase1_obj();
          }
          continue;
        }
        if (s == Step::kOptimal) {
          // Both verdicts here (feasible or not) only count on a clean
          // tableau; debris in the rhs column could fake either one.
          if (try_rebuild()) {
            set_phase1_obj();
            continue;
          }
          if (-obj[rhs] <= kFeasTol) break;
          // Leftover infeasibility can also mean the attempt froze columns
          // it actually needed (their entries decayed below the pivot floor
          // in a worn tableau). Only the per-pivot-refactorized attempt is
          // accurate enough to make this verdict final.
          if (!paranoid) {
            throw NumericalTrouble{"simplex: phase 1 left positive infeasibility"};
          }
          throw Infeasible("simplex: phase 1 left positive infeasibility");
        }
        // Stuck. The artificial sum is bounded below by zero, so a genuine
        // unbounded direction cannot exist here; on a clean tableau either
        // the infeasibility is already negligible or the column is noise.
        if (try_rebuild()) {
          set_phase1_obj();
          continue;
        }
        if (-obj[rhs] <= kFeasTol) break;
        frozen[stuck] = 1;
      }
      // Degenerate artificials still in the basis: pivot them out on any
      // structural column; an all-zero row is redundant and can stay parked.
      for (int r = 0; r < m; ++r) {
        if (basis_[r] < art0) continue;
        double* t = row(r);
        int enter = -1;
        for (int c = 0; c < art0; ++c)
          if (std::abs(t[c]) > pivot_floor(r, c)) {
            enter = c;
            break;
          }
        if (enter < 0) continue;
        double inv = 1.0 / t[enter];
        kernels::scale(t, inv, cols);
        t[enter] = 1.0;
        for (int r2 = 0; r2 <= m; ++r2) {
          if (r2 == r) continue;
          double* t2 = row(r2);
          double f = t2[enter];
          if (f == 0.0) continue;
          kernels::axpy(-f, t, t2, cols);
          t2[enter] = 0.0;
        }
        basis_[r] = enter;
        ++pivots_since_rebuild;
        paranoid_rebuild();
      }
    }

    // Phase 2: reduced costs of -objective (we minimize the negation).
    set_phase2_obj();
    for (;;) {
      int stuck = -1;
      Step s = pivot_step(art0, &stuck);
      if (s == Step::kPivoted) {
        if (paranoid && pivots_since_rebuild > 0) {
          paranoid_rebuild();
          set_phase2_obj();
        }
        continue;
      }
      if (s == Step::kOptimal) {
        if (!try_rebuild()) break;  // verdict reached on a clean tableau
        set_phase2_obj();
        continue;
      }
      // Stuck: consult geometry only on a clean tableau.
      if (try_rebuild()) {
        set_phase2_obj();
        continue;
      }
      if (column_is_ray(stuck)) throw Unbounded("simplex: unbounded direction");
      frozen[stuck] = 1;
    }
  };

  for (int attempt = 0;; ++attempt) {
    try {
      run_phases();
      break;
    } catch (const NumericalTrouble& trouble) {
      if (attempt > 0) throw SingularSystem(trouble.what);
      // Restart from the pristine rows with per-pivot refactorization.
      std::memcpy(tab_.data(), base.data(), sizeof(double) * base.size());
      std::memset(obj, 0, sizeof(double) * cols);
      basis_ = initial_basis;
      std::fill(frozen.begin(), frozen.end(), 0);
      pivots_since_rebuild = 0;
      rebuilds = 0;
      pivots = 0;
      growth = 1.0;
      paranoid = true;
    }
  }

  LpResult out;
  out.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r)
    if (basis_[r] < n) out.x[basis_[r]] = row(r)[rhs];
  out.objective = kernels::dot(out.x.data(), lp.objective.data(), n);
  out.pivots = pivots;
  return out;
}

}  // namespace celearn
