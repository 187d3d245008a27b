// Copyright 2026 The Qudit Control Authors
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

#include <cmath>
#include <exception>
#include <sstream>

#include "qudit/errors.hpp"
#include "qudit/linalg.hpp"
#include "qudit/propagate.hpp"

namespace qudit {

namespace {

class Dissipator {
  public:
    explicit Dissipator(const CollapseSet& set, int d) : anti_(Mat::Zero(d, d)) {
        for (const auto& c : set.ops) {
            Mat l = std::sqrt(c.rate) * c.op;
            anti_ += 0.5 * l.adjoint() * l;
            jumps_.push_back(std::move(l));
        }
    }

    bool empty() const { return jumps_.empty(); }

    Mat operator()(const Mat& rho) const {
        Mat out = -(anti_ * rho + rho * anti_);
        for (const auto& l : jumps_) out.noalias() += l * rho * l.adjoint();
        return out;
    }

  private:
    std::vector<Mat> jumps_;
    Mat anti_;
};

// Integrating-factor RK4 over one piecewise-constant sample. The coherent part
// is applied through exact unitaries, so an empty dissipator reduces to U rho U^dag.
Mat lawson_sample(const Mat& rho, const Mat& h, double dt, int substeps, const Dissipator& diss) {
    const double step = dt / substeps;
    const auto full = exp_minus_i(h, step);
    if (diss.empty()) {
        Mat w = full.value;
        for (int i = 1; i < substeps; ++i) w = full.value * w;
        return w * rho * w.adjoint();
    }
    const Mat half = exp_minus_i(h, 0.5 * step).value;
    const Mat& whole = full.value;
    auto fwd = [](const Mat& w, const Mat& x) -> Mat { return w * x * w.adjoint(); };
    auto bwd = [](const Mat& w, const Mat& x) -> Mat { return w.adjoint() * x * w; };

    Mat y = rho;
    for (int i = 0; i < substeps; ++i) {
        const Mat k1 = diss(y);
        const Mat k2 = bwd(half, diss(fwd(half, y + 0.5 * step * k1)));
        const Mat k3 = bwd(half, diss(fwd(half, y + 0.5 * step * k2)));
        const Mat k4 = bwd(whole, diss(fwd(whole, y + step * k3)));
        y = fwd(whole, y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    return y;
}

struct SampleStepper {
    const RotatingFrame& frame;
    const ControlHamiltonians& hams;
    const ControlPulse& pulse;
    const Dissipator& diss;
    const LindbladOptions& opts;

    Mat advance(const Mat& rho, std::size_t n) const {
        const Mat h = rotating_hamiltonian(frame, hams, pulse.samples[n]);
        if (exp_minus_i(h, pulse.dt_ns / opts.substeps).phase_span() >= 1.0) {
            std::ostringstream os;
            os << "sample " << n << ": ||H|| step >= 1, refine the time grid";
            throw RefineGridError(os.str());
        }
        if (diss.empty()) return lawson_sample(rho, h, pulse.dt_ns, opts.substeps, diss);
        int m = opts.substeps;
        Mat coarse = lawson_sample(rho, h, pulse.dt_ns, m, diss);
        double err = 0.0;
        for (int r = 0; r <= opts.max_refinements; ++r) {
            Mat fine = lawson_sample(rho, h, pulse.dt_ns, 2 * m, diss);
            err = max_abs(fine - coarse);
            if (err <= opts.tolerance) return fine;
            coarse = std::move(fine);
            m *= 2;
        }
        std::ostringstream os;
        os << "Lindblad step-halving estimate " << err << " exceeds tolerance " << opts.tolerance
           << " at sample " << n;
        throw AccuracyError(os.str(), err);
    }
};

void check_density(const Mat& rho0) {
    const double tr = std::abs(rho0.trace() - 1.0);
    if (tr > 1e-10 || hermiticity_deviation(rho0) > 1e-10)
        throw InvalidSpecError("initial density matrix must be Hermitian with unit trace");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho0);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw InvalidSpecError("initial density matrix must be positive semidefinite");
}

}  // namespace

TrajectoryResult lindblad_evolve(const RotatingFrame& frame, const ControlHamiltonians& hams,
                                 const ControlPulse& pulse, const Mat& rho0,
                                 const CollapseSet& collapse, const LindbladOptions& opts) {
    check_density(rho0);
    const int d = static_cast<int>(frame.delta.size());
    const Dissipator diss(collapse, d);
    const SampleStepper stepper{frame, hams, pulse, diss, opts};
    std::size_t stride = 1;
    if (opts.record_interval_ns > 0.0)
        stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.record_interval_ns / pulse.dt_ns)));

    TrajectoryResult out;
    out.frame = PulseFrame::rotating;
    Mat rho = rho0;
    auto record = [&](std::size_t n) {
        out.times_ns.push_back(static_cast<double>(n) * pulse.dt_ns);
        out.populations.push_back(diagonal_populations(rho));
        if (opts.keep_density) out.density.push_back(rho);
    };
    record(0);
    const std::size_t n_steps = pulse.samples.size();
    for (std::size_t n = 0; n < n_steps; ++n) {
        rho = stepper.advance(rho, n);
        if ((n + 1) % stride == 0 || n + 1 == n_steps) record(n + 1);
    }
    return out;
}

namespace {

Mat evolve_basis_column(const SampleStepper& stepper, int d, int col) {
    Mat rho = Mat::Zero(d, d);
    rho(col % d, col / d) = 1.0;
    for (std::size_t n = 0; n < stepper.pulse.samples.size(); ++n) rho = stepper.advance(rho, n);
    return rho;
}

}  // namespace

Mat gate_superoperator(const RotatingFrame& frame, const ControlHamiltonians& hams,
                       const ControlPulse& pulse, const CollapseSet& collapse,
                       const LindbladOptions& opts) {
    const int d = static_cast<int>(frame.delta.size());
    const Dissipator diss(collapse, d);
    const SampleStepper stepper{frame, hams, pulse, diss, opts};
    Mat s(d * d, d * d);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int col = 0; col < d * d; ++col) {
        try {
            s.col(col) = vectorize(evolve_basis_column(stepper, d, col));
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return s;
}

Mat gate_superoperator_serial(const RotatingFrame& frame, const ControlHamiltonians& hams,
                              const ControlPulse& pulse, const CollapseSet& collapse,
                              const LindbladOptions& opts) {
    const int d = static_cast<int>(frame.delta.size());
    const Dissipator diss(collapse, d);
    const SampleStepper stepper{frame, hams, pulse, diss, opts};
    Mat s(d * d, d * d);
    for (int col = 0; col < d * d; ++col) s.col(col) = vectorize(evolve_basis_column(stepper, d, col));
    return s;
}

std::vector<RVec> repeated_gate_trajectory(const RotatingFrame& frame, const ControlHamiltonians& hams,
                                           const ControlPulse& pulse, int n_reps, const Mat& rho0,
                                           const CollapseSet* collapse, const LindbladOptions& opts) {
    if (n_reps < 1) throw InvalidSpecError("n_reps must be >= 1");
    check_density(rho0);
    if (collapse == nullptr) return repeat_unitary(gate_propagator(frame, hams, pulse), rho0, n_reps);
    return repeat_superoperator(gate_superoperator(frame, hams, pulse, *collapse, opts), rho0, n_reps);
}

}  // namespace qudit
