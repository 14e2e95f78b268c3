// Copyright 2026 The iadmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Passive attacks on the token stream.
//
// Every activation k by agent i gives the eavesdropper two linear relations
// between i's state before (x, y) and after (x', y'), with g the step-size
// multiplier (1 unless guessed otherwise):
//
//   (1 + g) x' - x        = N (z^{k+1} - z^k) + g z^k
//   y' - y + rho g x'     = rho g z^k
//
// The first follows from the token fold plus the dual update, the second is
// the dual update itself. Neither depends on f_i or on how x' was computed.
// All attacks here work from these rows and the public (N, rho, z^0).
#ifndef IADMM_ADVERSARY_HPP_
#define IADMM_ADVERSARY_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "iadmm/consensus.hpp"
#include "iadmm/history.hpp"
#include "iadmm/sparse.hpp"

namespace iadmm {

struct AttackOptions {
  bool kkt_row = true;          // sum_i y_i(final) = 0
  bool pin_last_cycle = true;   // x_i(final) = z after its last activation
  double assumed_gamma = 1.0;
  double tol = 1e-10;           // lsqr atol = btol
  long max_iter = 0;            // lsqr; 0 = default
  std::vector<int> coordinates;  // empty = all
};

enum class RowKind { kInit, kRecursionX, kRecursionY, kKktSum, kConvergencePin };
const char* to_string(RowKind k);

enum class StateKind { kX, kY };

struct ColumnKey {
  int agent;
  int epoch;
  StateKind which;
};

// One coordinate's measurement system A v = b over per-(agent, epoch)
// unknowns.
struct MeasurementSystem {
  int coordinate = 0;
  SparseSystem system;
  std::vector<ColumnKey> columns;
  std::vector<RowKind> row_kinds;
  // epoch_begin[i][e] is the first iteration at which epoch e is current.
  std::vector<std::vector<long>> epoch_begin;

  int x_column(int agent, int epoch) const;
  int y_column(int agent, int epoch) const;

 private:
  friend MeasurementSystem build_ls_system(const Transcript&, Variant, long,
                                           int, const AttackOptions&);
  std::vector<int> first_column_;  // per agent
};

// Uses observations 0..K. Known-zero-init variants (I-ADMM, W-ADMM) get
// x = y = 0 rows for epoch 0 in place of the x - y/rho = 0 rows. Throws
// ValidationError if K exceeds the transcript, or if pinning is requested
// with fewer than N iterations.
MeasurementSystem build_ls_system(const Transcript& transcript, Variant variant,
                                  long K, int coordinate,
                                  const AttackOptions& options);

// Residual ||A v_truth - b|| with v_truth read from a ground-truth history.
double system_residual(const MeasurementSystem& ms, const StateHistory& truth);

struct CoordinateSolve {
  int coordinate;
  long rows;
  long cols;
  long iterations;
  bool converged;
  double residual_norm;
};

struct AttackReport {
  std::string method;
  // Estimated trajectories; coordinates the attack did not solve are NaN.
  StateHistory estimate;
  std::vector<CoordinateSolve> solves;
  bool assumption_violated = false;
  std::string note;
};

// Forward unrolling from a zero seed. Passing a random-init variant still
// runs, with assumption_violated set. For exact-prox runs y of every epoch
// after the first equals the gradient at that epoch's x.
AttackReport exact_recursion_attack(const Transcript& transcript,
                                    Variant declared = Variant::kIadmm);

// Pins the last active agent's final x to z^{K+1} and unrolls backward.
// Only that agent is estimated. y starts from the known zero state.
AttackReport terminal_backward_attack(const Transcript& transcript);

struct EpochBound {
  int n;  // epochs counted back from the final one
  long k_lo;
  long k_hi;
  double x_error;
  double y_error;
  double x_bound;  // 2^n eps
  double y_bound;  // rho (2^{floor(K/N)+1} - 2^n) eps
  bool holds() const { return x_error < x_bound && y_error < y_bound; }
};

struct BoundCheck {
  bool precondition = false;  // ||z^{K+1} - x_{i_K}^{K+1}|| < eps
  double terminal_gap = 0.0;
  std::vector<EpochBound> epochs;
  bool all_hold() const;
};

// Scores a terminal_backward_attack report against ground truth for
// 1 <= n <= floor(K/N) (cyclic order).
BoundCheck check_terminal_bounds(const Transcript& transcript,
                                 const AttackReport& report,
                                 const StateHistory& truth, double eps);

// Least-squares attack: one lsqr solve per coordinate (parallel across
// coordinates).
AttackReport lsq_attack(const Transcript& transcript, Variant variant,
                        const AttackOptions& options);

// Every agent except `target` colludes and contributes its full history.
// Unknowns are the target's per-epoch states only.
AttackReport colluding_attack(const Transcript& transcript, int target,
                              const StateHistory& colluders,
                              const AttackOptions& options);

struct DimensionCount {
  long equations = 0;
  long unknowns = 0;
  bool operator==(const DimensionCount&) const = default;
};

struct CountReport {
  // Rows and columns build_ls_system produces for these options.
  DimensionCount implemented;
  // With each activation's multiplier counted as an unknown (step-size
  // perturbed variant only; equals `implemented` otherwise).
  DimensionCount with_gamma_unknowns;
  // One summed init row instead of N (the count printed for the
  // random-init variant); no options.
  DimensionCount single_init_row;
};

// Enumerates the cyclic activation order for iterations 0..K.
CountReport count_equations_unknowns(Variant variant, long K, int n_agents,
                                     const AttackOptions& options);

// Colluding system for `target`, multipliers unknown, no KKT or pin rows:
// one init row, two rows per target activation.
DimensionCount count_colluding(long K, int n_agents, int target = 0);

struct ScoreRow {
  long k;
  int coordinate;
  double truth_x;
  double est_x;
  double truth_y;
  double est_y;
  double abs_err_x;
  double abs_err_y;
};

// Rows for k = 0..k_last. Without truth the truth/error columns are NaN.
std::vector<ScoreRow> score_agent(const StateHistory& estimate,
                                  const StateHistory* truth, int agent,
                                  long k_last, const std::vector<int>& coords);

// "#schema=1", "#agent=<1-based>", header
// k,coordinate,truth_x,est_x,truth_y,est_y,abs_err_x,abs_err_y.
void write_attack_csv(std::ostream& out, int agent,
                      const std::vector<ScoreRow>& rows);

}  // namespace iadmm

#endif  // IADMM_ADVERSARY_HPP_
