// Rotating-frame term-collection engine.
//
// Interactions are sums of rotating monomials  amp * W * e^{2 pi i f t}
// where W is an operator word over two qubits (in their own eigenbases) and
// seven boson modes, and f is the signed sum of the constituents' rotation
// frequencies (GHz): qubit raising/lowering at +-2*splitting, bosons at
// +-omega, classical drive tones at +-omega_drive.
//
// Ordered products  I_a(t1) int I_b(t2) int I_c(t3)  (t1 > t2 > t3) are
// integrated term by term. With U = 1 + sum (-2 pi i)^n int...int H^n and
// U = exp(-2 pi i H_eff t), each nested integral contributes a factor
// -1/(partial frequency sum), the partial sum running over the inner
// factors. Boundary ("-1") terms of the integrals are dropped by default.
// Two denominator conventions are supported:
//   exact     - the true partial sums (default)
//   collapsed - each partial sum is replaced by (net count)*omega of the
//               highest-frequency bus family it contains; third-order paths
//               whose two denominators both collapse onto the common (O)
//               junction are dropped entirely
// the latter reproducing the hand-derived closed forms.
//
// Bus modes (X, Y, Z, O) stay in their ground state: when words are
// normal-ordered, bus terms retaining both raising and lowering content are
// dropped (a a^dag -> 1, a^dag a -> 0). This is exact here because no
// interaction chain carries more than two operators of one bus family.
// Dynamical modes (x, y, z) keep full normal-ordered operator content.
#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "zbsim/config.hpp"
#include "zbsim/linalg.hpp"

namespace zbsim::rwa {

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mode bookkeeping: dynamical x,y,z then buses X,Y,Z then common O.
inline constexpr int kModeCount = 7;
inline constexpr int kModeO = 6;
int mode_index(char c);           // 'x','y','z','X','Y','Z','O'
char mode_char(int idx);
inline bool is_bus(int idx) { return idx >= 3; }

// Qubit operators in the qubit's own eigenbasis {|e>, |g>}:
// I, P = |e><g| (rotates at +2*splitting), M = |g><e|, D = sigma_z.
enum class QOp : uint8_t { I = 0, P = 1, M = 2, D = 3 };

struct Word {
  QOp q1 = QOp::I, q2 = QOp::I;
  std::array<uint8_t, kModeCount> dag{}; // normal-ordered creation counts
  std::array<uint8_t, kModeCount> ann{}; // annihilation counts

  bool operator==(const Word&) const = default;
  bool operator<(const Word& o) const;
  Word conjugate() const;
  std::string str() const;
};

struct Monomial {
  cxd amp;                    // GHz^k prefactor
  double freq_ghz = 0.0;      // total rotation frequency
  double drive_freq_ghz = 0.0; // classical-tone part of freq_ghz
  Word word;
};

struct Interaction {
  std::string name;
  std::vector<Monomial> monomials;
};

// Engine parameter block. Couplings are the rotated-frame factors
// Z_i^{(l)}, X_i^{(l)} in GHz; splitting_ghz are the free-qubit half-gaps
// (X_0^{(1)}, Z_0^{(2)}), so eigenoperators rotate at twice these.
struct EngineInput {
  int dimension = 3;
  std::array<std::array<double, 4>, 2> zcoup{}; // [qubit][i=0..3]
  std::array<std::array<double, 4>, 2> xcoup{};
  std::array<double, 2> splitting_ghz{};
  std::array<double, kModeCount> lambda{};
  std::array<double, kModeCount> omega_ghz{};
  std::array<double, 3> el_ghz{}; // ring coupling energy per axis

  struct Drive {
    double n = 0.0;
    double omega_ghz = 0.0;
    double phase = 0.0;
  };
  std::map<std::string, Drive> drives; // keys m, x1, x2, y1, y2, z

  EngineOptions options;
};

// Fill drive frequencies/phases with the resonance conditions:
//   m:  omega = 2 X0^(1), phase 0        (1+1D: same)
//   z:  omega = omega_z,  phase -pi/2
//   y1: omega = 2 Z0^(2) + omega_y, 0    y2: 2 Z0^(2) - omega_y, pi
//   x1: omega = 2 Z0^(2) + omega_x, -pi/2  x2: 2 Z0^(2) - omega_x, +pi/2
//   1+1D x1: omega = omega_x, phase +pi/2
// Zero-frequency entries are replaced; explicit nonzero ones are kept.
EngineInput resonant_drives(EngineInput in);

struct ResonanceReport {
  struct Line {
    std::string name;
    double residual_ghz = 0.0;
    bool ok = false;
  };
  std::vector<Line> lines;
  std::vector<std::string> warnings; // frequency-hierarchy diagnostics
  bool all_ok = false;
};
ResonanceReport validate_resonance(const EngineInput& in,
                                   double tol_ghz = 1e-6);

// Exact monomial sets of the per-axis interaction lists (axis 0,1,2 =
// x,y,z). 3+1D/2+1D axes produce the three-factor sets; dimension 1
// produces the two-factor set (third entry empty). Throws EngineError when
// a needed drive is missing.
std::array<Interaction, 3> build_axis_interactions(const EngineInput& in,
                                                   int axis);
// First-order mass-channel drive lines on qubit 1 (linear + derivative).
Interaction build_mass_lines(const EngineInput& in);
// Static qubit-common-junction exchange pair (momentum-offset channel).
std::array<Interaction, 2> build_cp0_pair(const EngineInput& in);

struct Provenance {
  std::string ordering;               // e.g. "I1*I2*I3"
  std::vector<double> partials_ghz;   // exact inner partial sums
  std::vector<double> denominators_ghz; // values actually divided by
};

struct IntegratedTerm {
  Monomial mono;
  Provenance prov;
};

struct IntegralOptions {
  double eps_den_ghz = 0.1;
  bool collapsed = false;
  bool keep_boundary = false;
  std::array<double, kModeCount> omega_ghz{}; // for collapsed denominators
};

// factors[0] is the latest time (outermost, not integrated); k = 1..3.
// discarded_paths, when given, counts collapsed-mode paths dropped by the
// double-common-junction rule.
std::vector<IntegratedTerm> ordered_integral(
    const std::vector<const Interaction*>& factors,
    const IntegralOptions& opt, int* discarded_paths = nullptr);

struct EffectiveCoupling {
  cxd coeff_mhz;
  Word word;
  std::vector<Provenance> sources;
};

struct TermCensus {
  int kept = 0;
  int dropped = 0;
  int discarded_paths = 0;             // collapsed-mode double-O paths
  std::map<double, int> freq_histogram; // rounded GHz -> count
};

std::vector<EffectiveCoupling> collect_secular(
    const std::vector<IntegratedTerm>& terms, double tol_ghz,
    TermCensus* census = nullptr);

bool hermitian_closed(const std::vector<EffectiveCoupling>& cs,
                      double tol_mhz = 1e-11);

struct Channel {
  std::string name; // mass, cp_x, cp_y, cp_z, cp_0
  std::vector<EffectiveCoupling> couplings;
  TermCensus census;
  cxd channel_mhz{};     // least-squares projection onto the pattern
  cxd closed_form_mhz{}; // hand-coded closed form
  double max_rel_mismatch = 0.0; // engine vs closed*pattern, per word
};

struct EffectiveModel {
  std::vector<Channel> channels;
  ResonanceReport resonance;
};

EffectiveModel effective_hamiltonian(const EngineInput& in);

// Hand-coded closed forms and their word patterns (unit normalization).
cxd closed_form_channel_mhz(const EngineInput& in, const std::string& name);
std::vector<std::pair<Word, cxd>> channel_pattern(const EngineInput& in,
                                                  const std::string& name);

// Dense assembly on qubit1 (x) qubit2 (x) listed boson slots. nqubits is 1
// or 2; bus content must have been eliminated unless a slot is provided.
struct BosonSlot {
  int mode = 0;
  int dim = 0;
};
Mat assemble_matrix(const std::vector<EffectiveCoupling>& cs, int nqubits,
                    const std::vector<BosonSlot>& slots);
// Interaction-picture Hamiltonian at time t (ns) on the same space.
Mat assemble_time_dependent(const std::vector<const Interaction*>& parts,
                            double t_ns, int nqubits,
                            const std::vector<BosonSlot>& slots);

} // namespace zbsim::rwa
