#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "spiralwave/greens_rect.hpp"
#include "spiralwave/types.hpp"
#include "spiralwave/wavenumber.hpp"

namespace spiralwave {

struct EpsilonPolicy {
    enum class Kind { constant, single_spiral_walls, symmetric_pair };
    Kind kind = Kind::constant;
    double constant_value = 0.01;

    // 4/(Lx+Ly).
    static EpsilonPolicy constant_for(const RectDomain& dom) { return {Kind::constant, 4 / (dom.lx + dom.ly)}; }
};

std::string to_string(EpsilonPolicy::Kind k);
EpsilonPolicy::Kind parse_epsilon_kind(const std::string& s);

struct SpiralState {
    SpiralList spirals;
    double t = 0;
};

double eval_epsilon(const SpiralState& state, const RectDomain& dom, const EpsilonPolicy& policy);

enum class Law { canonical, near_field, uniform, b_corrected };
std::string to_string(Law law);
Law parse_law(const std::string& s);

using Velocities = std::vector<Vec2>;

// v_l = (4 pi q n_l / beta_l) sum_j beta_j perp grad G'_n(x_l;x_j) + 4 pi q n_l perp grad G'_n,reg(x_l;x_l).
Velocities velocity_canonical(const SpiralConfigurationParams& cfg, double k, const Eigen::VectorXd& beta);

// Laplace image law; requires 0 < q log(1/eps) < pi/2.
Velocities velocity_near_field(const SpiralList& spirals, double q, double eps, const RectDomain& dom,
                               const ImageTruncation& trunc = laplace_truncation_default());

// Canonical law plus the Dirichlet modified-Helmholtz correction carrying cot(q log eps).
Velocities velocity_uniform(const SpiralConfigurationParams& cfg, double eps, double k, const Eigen::VectorXd& beta);
Velocities velocity_uniform(const SpiralConfigurationParams& cfg, double eps);

// Near-field law with the small-b mixture of gradient and perpendicular
// gradient; btilde = 0 reproduces velocity_near_field.
Velocities velocity_near_field_bcorrected(const SpiralList& spirals, double q, double eps, const RectDomain& dom,
                                          double btilde, const ImageTruncation& trunc = laplace_truncation_default());

struct MotionModel {
    double q = 0.1;
    RectDomain dom{200.0, 200.0};
    double c1 = 0;
    Law law = Law::uniform;
    EpsilonPolicy policy{};
    double btilde = 0;
    ImageTruncation trunc{};

    SpiralConfigurationParams config(const SpiralList& spirals) const { return {spirals, q, dom, c1, trunc}; }
};

// Law evaluation with the wavenumber continued from call to call.
class LawEvaluator {
public:
    struct Frozen {
        double k = 0;  // 0 for the near-field laws
        Eigen::VectorXd beta;
        double eps = 0;
    };

    explicit LawEvaluator(MotionModel model) : model_(std::move(model)) {}

    // Re-solves k/beta (when the law needs them) and eps at the given state.
    Frozen refresh(const SpiralList& spirals);
    // Velocity with k, beta and eps held at their refreshed values.
    Velocities velocity(const SpiralList& spirals, const Frozen& frozen) const;
    Velocities velocity(const SpiralList& spirals) { return velocity(spirals, refresh(spirals)); }

    const MotionModel& model() const { return model_; }

private:
    MotionModel model_;
    double k_prev_ = 0;
};

struct StepControl {
    double h = 0.5;
    // Halve h until successive runs agree to refine_tol per 100 time units.
    bool refine = true;
    double refine_tol = 1e-6;
    int max_halvings = 8;
    // When positive, each step is shortened so no spiral moves farther than this.
    double max_displacement = 0;
    int record_stride = 1;
};

enum class Termination { t_max, wall_contact, collision, k_solve_failure };
std::string to_string(Termination t);

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<std::vector<Vec2>> positions;
    std::vector<double> k_series;
    std::vector<double> eps_series;
    Termination termination = Termination::t_max;
    std::string message;
    double step = 0;  // step size of the returned run
    int halvings = 0;
};

// Distance-based stop conditions shared by the integrators.
std::optional<Termination> check_contact(const SpiralList& spirals, const RectDomain& dom);

// Classical RK4 with k/beta/eps refreshed at every stage.  t_end < state0.t
// integrates backwards in time.
TrajectoryRecord integrate(const SpiralState& state0, const MotionModel& model, double t_end,
                           const StepControl& ctrl = {});

// One RK4 step of size h; frozen holds the law data already refreshed at the
// starting state, the later stages refresh their own.
SpiralList rk4_step(LawEvaluator& law, const SpiralList& spirals, const LawEvaluator::Frozen& frozen, double h);

}  // namespace spiralwave
