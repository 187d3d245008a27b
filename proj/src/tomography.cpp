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

#include "qudit/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

#include "qudit/errors.hpp"
#include "qudit/linalg.hpp"

namespace qudit {

namespace {

Mat pauli_on(int a, int b, char which) {
    Mat m = Mat::Identity(3, 3);
    m(a, a) = m(b, b) = 0.0;
    switch (which) {
        case 'X':
            m(a, b) = m(b, a) = 1.0;
            break;
        case 'Y':
            m(a, b) = -kI;
            m(b, a) = kI;
            break;
        default:
            m(a, a) = 1.0;
            m(b, b) = -1.0;
    }
    return m;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ProcessBasis build_basis() {
    ProcessBasis pb;
    pb.elements = {Mat::Identity(3, 3), pauli_on(0, 1, 'Z'), pauli_on(1, 2, 'Z'),
                   pauli_on(0, 1, 'X'), pauli_on(1, 2, 'X'), pauli_on(0, 1, 'Y'),
                   pauli_on(1, 2, 'Y'), pauli_on(0, 1, 'X') * pauli_on(1, 2, 'X'),
                   pauli_on(1, 2, 'X') * pauli_on(0, 1, 'X')};
    pb.labels = {"I", "Z01", "Z12", "X01", "X12", "Y01", "Y12", "X01X12", "X12X01"};
    pb.gram.resize(kBasisSize, kBasisSize);
    for (int m = 0; m < kBasisSize; ++m)
        for (int n = 0; n < kBasisSize; ++n)
            pb.gram(m, n) = (pb.elements[m].adjoint() * pb.elements[n]).trace();
    return pb;
}

// Columns hold vec(B_n) and vec(conj(B_n) (x) B_m) respectively.
struct BasisTables {
    Mat vec_basis;      // 9 x 9
    Mat kron_basis;     // 81 x 81, column m + 9 n
    std::array<Mat, kBasisSize * kBasisSize> products;  // B_n^dag B_m at m + 9 n
    Eigen::PartialPivLU<Mat> vec_lu;
    Eigen::PartialPivLU<Mat> kron_lu;
};

const BasisTables& tables() {
    static const BasisTables t = [] {
        const auto& pb = process_basis();
        BasisTables bt;
        bt.vec_basis.resize(kBasisSize, kBasisSize);
        bt.kron_basis.resize(kBasisSize * kBasisSize, kBasisSize * kBasisSize);
        for (int n = 0; n < kBasisSize; ++n) {
            bt.vec_basis.col(n) = vectorize(pb.elements[n]);
            for (int m = 0; m < kBasisSize; ++m) {
                bt.kron_basis.col(m + kBasisSize * n) =
                    vectorize(kron(pb.elements[n].conjugate(), pb.elements[m]));
                bt.products[m + kBasisSize * n] = pb.elements[n].adjoint() * pb.elements[m];
            }
        }
        bt.vec_lu.compute(bt.vec_basis);
        bt.kron_lu.compute(bt.kron_basis);
        return bt;
    }();
    return t;
}

Mat tp_residual(const Mat& chi) {
    const auto& t = tables();
    Mat acc = -Mat::Identity(3, 3);
    for (int n = 0; n < kBasisSize; ++n)
        for (int m = 0; m < kBasisSize; ++m) acc += chi(m, n) * t.products[m + kBasisSize * n];
    return acc;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Square complex factor A, packed as (re, im) pairs in column-major order.
constexpr int kParams = kBasisSize * kBasisSize;
constexpr int kFactorParams = 2 * kParams;

Mat unpack_factor(const RVec& p) {
    Mat a(kBasisSize, kBasisSize);
    for (int i = 0; i < kParams; ++i) a.data()[i] = cplx(p[2 * i], p[2 * i + 1]);
    return a;
}

RVec pack_factor(const Mat& a) {
    RVec p(kFactorParams);
    for (int i = 0; i < kParams; ++i) {
        p[2 * i] = a.data()[i].real();
        p[2 * i + 1] = a.data()[i].imag();
    }
    return p;
}

Mat chi_from_factor(const RVec& p) {
    Mat a = unpack_factor(p);
    Mat aa = a * a.adjoint();
    cplx norm = (aa * process_basis().gram).trace();
    return (static_cast<double>(kProcessDim) / norm.real()) * aa;
}

// Hermitian 9 x 9 from 81 reals: diagonal, then (re, im) of the strict upper part.
Mat hermitian_from_params(const RVec& p) {
    Mat h = Mat::Zero(kBasisSize, kBasisSize);
    int k = kBasisSize;
    for (int i = 0; i < kBasisSize; ++i) {
        h(i, i) = p[i];
        for (int j = i + 1; j < kBasisSize; ++j, k += 2) {
            h(i, j) = cplx(p[k], p[k + 1]);
            h(j, i) = std::conj(h(i, j));
        }
    }
    return h;
}

RVec hermitian_to_params(const Mat& h) {
    RVec p(kParams);
    int k = kBasisSize;
    for (int i = 0; i < kBasisSize; ++i) {
        p[i] = h(i, i).real();
        for (int j = i + 1; j < kBasisSize; ++j, k += 2) {
            p[k] = h(i, j).real();
            p[k + 1] = h(i, j).imag();
        }
    }
    return p;
}

// Population residuals (model - measured) for rep >= 1 over all inputs.
RVec population_residuals(const Mat& chi, const ProcessData& measured, int reps) {
    ProcessData model = simulate_process_data(ProcessMatrix{chi}, reps);
    RVec r(kProcessDim * reps * kProcessDim);
    int k = 0;
    for (int s = 0; s < kProcessDim; ++s)
        for (int n = 1; n <= reps; ++n)
            for (int j = 0; j < kProcessDim; ++j) r[k++] = model[s][n][j] - measured[s][n][j];
    return r;
}

struct FitProblem {
    const ProcessData* measured;
    Mat prior;
    double tp_weight;
    double prior_weight;
};

RVec chi_residuals(const Mat& chi, const FitProblem& fp, int reps) {
    RVec pop = population_residuals(chi, *fp.measured, reps);
    Mat tp = tp_residual(chi);
    const Eigen::Index n = pop.size();
    RVec r(n + 2 * kBasisSize + 2 * kParams);
    r.head(n) = pop;
    const double w = std::sqrt(fp.tp_weight);
    for (int i = 0; i < kBasisSize; ++i) {
        r[n + 2 * i] = w * tp.data()[i].real();
        r[n + 2 * i + 1] = w * tp.data()[i].imag();
    }
    const double v = std::sqrt(fp.prior_weight);
    for (int i = 0; i < kParams; ++i) {
        const cplx d = chi.data()[i] - fp.prior.data()[i];
        r[n + 2 * kBasisSize + 2 * i] = v * d.real();
        r[n + 2 * kBasisSize + 2 * i + 1] = v * d.imag();
    }
    return r;
}

template <class F>
RMat central_jacobian(const F& f, const RVec& x, Eigen::Index rows) {
    RMat jac(rows, x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-7 * std::max(1.0, std::abs(x[i]));
        RVec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        jac.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return jac;
}

void validate_data(const ProcessData& d) {
    if (d.size() != static_cast<std::size_t>(kProcessDim))
        throw FormatError("process data needs trajectories for |0>, |1> and |2>");
    for (const auto& traj : d) {
        if (traj.size() != d[0].size()) throw FormatError("process data trajectories differ in length");
        for (const auto& p : traj)
            if (p.size() < kProcessDim) throw FormatError("process data rows need at least 3 populations");
    }
    if (d[0].size() < 3) throw RangeError("process fit needs at least 2 repetitions");
}

}  // namespace

const ProcessBasis& process_basis() {
    static const ProcessBasis pb = build_basis();
    return pb;
}

double ProcessMatrix::tp_violation() const { return max_abs(tp_residual(chi)); }

double ProcessMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (chi + chi.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Mat apply_process(const ProcessMatrix& chi, const Mat& rho) {
    const auto& b = process_basis().elements;
    Mat out = Mat::Zero(3, 3);
    for (int m = 0; m < kBasisSize; ++m) {
        Mat left = b[m] * rho;
        for (int n = 0; n < kBasisSize; ++n)
            if (chi.chi(m, n) != 0.0) out += chi.chi(m, n) * left * b[n].adjoint();
    }
    return out;
}

ProcessMatrix chi_from_unitary(const Mat& u) {
    if (u.rows() != kProcessDim || u.cols() != kProcessDim)
        throw InvalidSpecError("chi_from_unitary expects a 3 x 3 matrix");
    Vec v = tables().vec_lu.solve(vectorize(u));
    return ProcessMatrix{v * v.adjoint()};
}

Mat superoperator_from_chi(const ProcessMatrix& chi) {
    Vec s = tables().kron_basis * vectorize(chi.chi);
    return unvectorize(s, kBasisSize);
}

ProcessMatrix chi_from_superoperator(const Mat& s) {
    if (s.rows() != kBasisSize || s.cols() != kBasisSize)
        throw InvalidSpecError("chi_from_superoperator expects a 9 x 9 superoperator");
    Vec c = tables().kron_lu.solve(vectorize(s));
    Mat chi = unvectorize(c, kBasisSize);
    return ProcessMatrix{0.5 * (chi + chi.adjoint())};
}

Mat normalized_choi(const ProcessMatrix& chi) {
    const Mat& vb = tables().vec_basis;
    Mat j = vb * chi.chi * vb.adjoint();
    return j / j.trace().real();
}

namespace {

// Square root that drops eigenvalues at rounding level, so rank-deficient
// inputs do not pick up spurious sqrt(eps) contributions.
Mat truncated_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
    const RVec& ev = es.eigenvalues();
    const double cut = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    RVec root(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) root[i] = ev[i] > cut ? std::sqrt(ev[i]) : 0.0;
    return es.eigenvectors() * root.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double process_fidelity(const ProcessMatrix& a, const ProcessMatrix& b) {
    const Mat ra = truncated_sqrt(normalized_choi(a));
    const double root = truncated_sqrt(ra * normalized_choi(b) * ra).trace().real();
    return root * root;
}

ProcessData simulate_process_data(const ProcessMatrix& chi, int n_reps) {
    if (n_reps < 1) throw RangeError("simulate_process_data needs n_reps >= 1");
    Mat s = superoperator_from_chi(chi);
    ProcessData out(kProcessDim);
    for (int k = 0; k < kProcessDim; ++k) {
        Vec v = Vec::Zero(kBasisSize);
        v[k + kProcessDim * k] = 1.0;
        out[k].reserve(n_reps + 1);
        for (int r = 0; r <= n_reps; ++r) {
            if (r > 0) v = s * v;
            RVec p(kProcessDim);
            for (int j = 0; j < kProcessDim; ++j) p[j] = v[j + kProcessDim * j].real();
            out[k].push_back(p);
        }
    }
    return out;
}

namespace {

struct LmOutcome {
    int iterations = 0;
    bool converged = false;
    std::string stop_reason = "max_iterations";
};

// Levenberg-Marquardt with diagonal (Marquardt) scaling and a central
// difference Jacobian. Updates x in place.
template <class F>
LmOutcome levenberg_marquardt(const F& res, RVec& x, int max_iterations, double rel_tolerance) {
    LmOutcome out;
    RVec r = res(x);
    double cost = r.squaredNorm();
    double mu = 1e-3;
    for (; out.iterations < max_iterations; ++out.iterations) {
        if (cost < 1e-26) {
            out.converged = true;
            out.stop_reason = "residual_tolerance";
            return out;
        }
        RMat jac = central_jacobian(res, x, r.size());
        RMat jtj = jac.transpose() * jac;
        RVec g = jac.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < 1e-15) {
            out.converged = true;
            out.stop_reason = "gradient_tolerance";
            return out;
        }
        RVec scale = jtj.diagonal().cwiseMax(1e-12 * jtj.diagonal().maxCoeff());

        bool accepted = false;
        double gain = 0.0;
        for (int tries = 0; tries < 40 && !accepted; ++tries) {
            RMat lhs = jtj;
            lhs.diagonal() += mu * scale;
            RVec xn = x + lhs.ldlt().solve(-g);
            RVec rn = res(xn);
            const double cn = rn.squaredNorm();
            if (std::isfinite(cn) && cn < cost) {
                gain = cost - cn;
                x = xn;
                r = rn;
                cost = cn;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
            } else {
                mu *= 4.0;
            }
        }
        if (!accepted) {
            out.converged = true;
            out.stop_reason = "no_descent";
            return out;
        }
        if (gain <= rel_tolerance * cost) {
            out.converged = true;
            out.stop_reason = "function_tolerance";
            ++out.iterations;
            return out;
        }
    }
    return out;
}

}  // namespace

FitResult fit_chi(const ProcessData& raw, const Mat& target, const FitOptions& opts) {
    validate_data(raw);
    const auto& pb = process_basis();
    ProcessData measured(kProcessDim);
    for (int s = 0; s < kProcessDim; ++s)
        for (const RVec& row : raw[s]) {
            RVec p = row.head(kProcessDim);
            if (opts.renormalize) {
                const double total = p.sum();
                if (!(total > 0.0)) throw FormatError("process data row has no computational population");
                p /= total;
            }
            measured[s].push_back(p);
        }
    const int reps = static_cast<int>(measured[0].size()) - 1;

    std::mt19937_64 rng(splitmix64(opts.seed));
    std::normal_distribution<double> gauss;
    Mat a(kBasisSize, kBasisSize);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = cplx(gauss(rng), gauss(rng));
    Mat noise = a * a.adjoint();
    noise *= kProcessDim / (noise * pb.gram).trace().real();
    Mat chi0 = chi_from_unitary(target).chi;
    Mat start = (1.0 - opts.init_noise) * chi0 + opts.init_noise * noise;
    RVec x = pack_factor(psd_sqrt(start));

    const FitProblem problem{&measured, chi0, opts.tp_penalty, opts.prior_weight};

    // Long sequences make the residual a high-degree polynomial in chi, so the
    // fit walks in from short prefixes of the data.
    std::vector<int> schedule;
    for (int n = 2; n < reps; n *= 2) schedule.push_back(n);
    schedule.push_back(reps);

    FitDiagnostics diag;
    diag.parameters = kFactorParams;
    int budget = opts.max_iterations;
    LmOutcome lm;
    for (int n : schedule) {
        auto res = [&](const RVec& p) { return chi_residuals(chi_from_factor(p), problem, n); };
        const bool last = n == reps;
        lm = levenberg_marquardt(res, x, last ? budget : std::min(budget, 50),
                                 last ? opts.relative_tolerance : 1e-3);
        diag.iterations += lm.iterations;
        budget = std::max(0, budget - lm.iterations);
    }
    diag.converged = lm.converged;
    diag.stop_reason = lm.stop_reason;

    FitResult out;
    out.chi.chi = chi_from_factor(x);
    out.chi.chi = 0.5 * (out.chi.chi + out.chi.chi.adjoint());

    RVec pop = population_residuals(out.chi.chi, measured, reps);
    diag.residual_sum_squares = pop.squaredNorm();
    diag.residual_rms = std::sqrt(diag.residual_sum_squares / static_cast<double>(pop.size()));
    diag.tp_violation = out.chi.tp_violation();

    // Sensitivity of the populations to every Hermitian direction in chi.
    RVec h0 = hermitian_to_params(out.chi.chi);
    auto pop_of = [&](const RVec& p) { return population_residuals(hermitian_from_params(p), measured, reps); };
    RMat jh = central_jacobian(pop_of, h0, pop.size());
    Eigen::JacobiSVD<RMat> svd(jh);
    const RVec& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    const double smin = sv.size() ? sv[sv.size() - 1] : 0.0;
    diag.jacobian_condition = smin > 1e-300 * smax ? smax / smin : 1e300;
    diag.jacobian_condition = std::min(diag.jacobian_condition, 1e300);
    diag.jacobian_rank = static_cast<int>((sv.array() > 1e-10 * smax).count());
    // a wide Jacobian is rank deficient by construction
    diag.identifiability_warning = diag.jacobian_condition > opts.identifiability_threshold ||
                                   diag.jacobian_rank < kParams;
    out.diagnostics = diag;
    return out;
}

double entanglement_fidelity(const ProcessMatrix& chi, const Mat& u, const Mat& rho) {
    const auto& b = process_basis().elements;
    Vec left(kBasisSize), right(kBasisSize);
    for (int m = 0; m < kBasisSize; ++m) {
        left[m] = (u.adjoint() * b[m] * rho).trace();
        right[m] = (rho * b[m].adjoint() * u).trace();
    }
    cplx f = left.transpose() * chi.chi * right;
    if (std::abs(f.imag()) > 1e-9)
        throw NumericIntegrityError("entanglement fidelity has imaginary part " + std::to_string(f.imag()));
    return f.real();
}

double gate_fidelity(const ProcessMatrix& chi, const Mat& u, const Vec& psi) {
    Mat out = apply_process(chi, psi * psi.adjoint());
    Vec upsi = u * psi;
    cplx f = upsi.dot(out * upsi);
    if (std::abs(f.imag()) > 1e-9)
        throw NumericIntegrityError("gate fidelity has imaginary part " + std::to_string(f.imag()));
    return f.real();
}

Vec haar_state(int d, std::uint64_t stream_seed) {
    std::mt19937_64 rng(stream_seed);
    std::normal_distribution<double> gauss;
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = cplx(gauss(rng), gauss(rng));
    return v / v.norm();
}

namespace {

std::uint64_t sample_seed(std::uint64_t seed, int i) {
    return splitmix64(splitmix64(seed) + static_cast<std::uint64_t>(i));
}

FidelityReport finish_report(const ProcessMatrix& chi, const Mat& u, const std::vector<double>& f,
                             std::uint64_t seed) {
    FidelityReport rep;
    for (int k = 0; k < kProcessDim; ++k) {
        Mat rho = Mat::Zero(3, 3);
        rho(k, k) = 1.0;
        rep.entanglement_by_level[k] = clamp01(entanglement_fidelity(chi, u, rho));
    }
    const double fe = entanglement_fidelity(chi, u, Mat::Identity(3, 3) / 3.0);
    rep.entanglement_fidelity = clamp01(fe);
    rep.gate_fidelity_from_entanglement = clamp01((kProcessDim * fe + 1.0) / (kProcessDim + 1.0));
    const double n = static_cast<double>(f.size());
    double sum = 0.0;
    for (double v : f) sum += v;
    const double mean = sum / n;
    double var = 0.0;
    for (double v : f) var += (v - mean) * (v - mean);
    rep.average_gate_fidelity = clamp01(mean);
    rep.standard_error = f.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    rep.samples = static_cast<int>(f.size());
    rep.seed = seed;
    return rep;
}

void check_inputs(const Mat& u, int n_samples) {
    if (u.rows() != kProcessDim || u.cols() != kProcessDim)
        throw InvalidSpecError("fidelity target must be 3 x 3");
    if (n_samples < 1) throw RangeError("fidelity averaging needs at least one sample");
}

}  // namespace

FidelityReport average_fidelities(const ProcessMatrix& chi, const Mat& u, int n_samples, std::uint64_t seed) {
    check_inputs(u, n_samples);
    std::vector<double> f(n_samples);
    std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_samples; ++i) {
        try {
            f[i] = gate_fidelity(chi, u, haar_state(kProcessDim, sample_seed(seed, i)));
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return finish_report(chi, u, f, seed);
}

FidelityReport average_fidelities_serial(const ProcessMatrix& chi, const Mat& u, int n_samples,
                                         std::uint64_t seed) {
    check_inputs(u, n_samples);
    std::vector<double> f(n_samples);
    for (int i = 0; i < n_samples; ++i) f[i] = gate_fidelity(chi, u, haar_state(kProcessDim, sample_seed(seed, i)));
    return finish_report(chi, u, f, seed);
}

Mat computational_block(const Mat& m) { return m.topLeftCorner(kProcessDim, kProcessDim); }

Mat restrict_superoperator(const Mat& s, int d) {
    if (d < kProcessDim || s.rows() != d * d || s.cols() != d * d)
        throw InvalidSpecError("superoperator size does not match the level count");
    Mat r(kBasisSize, kBasisSize);
    for (int a = 0; a < kProcessDim; ++a)
        for (int b = 0; b < kProcessDim; ++b)
            for (int c = 0; c < kProcessDim; ++c)
                for (int e = 0; e < kProcessDim; ++e)
                    r(a + kProcessDim * b, c + kProcessDim * e) = s(a + d * b, c + d * e);
    return r;
}

}  // namespace qudit
