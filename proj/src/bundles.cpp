#include "floquet/bundles.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "floquet/log.hpp"

namespace floquet {

const char* orientation_name(Orientation o) {
    switch (o) {
        case Orientation::Orientable: return "orientable";
        case Orientation::NonOrientable: return "non-orientable";
        case Orientation::Undetermined: return "undetermined";
    }
    return "undetermined";
}

std::vector<ComplexInterval> apply_Q(const MatrixFourierSeq& Q, const Interval& theta,
                                     const std::vector<ComplexInterval>& v) {
    IntervalMatrix Qt = eval_at(Q, theta);
    const std::size_t n = Q.n;
    if (v.size() != n) fail(ErrorCode::DimensionMismatch, "eigenvector has wrong dimension");
    std::vector<ComplexInterval> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        Interval re(0.0), im(0.0);
        for (std::size_t j = 0; j < n; ++j) {
            re += Qt(i, j) * v[j].re;
            im += Qt(i, j) * v[j].im;
        }
        w[i] = ComplexInterval{re, im};
    }
    return w;
}

BundleSample bundle_at(double theta, const VerifiedFloquetForm& form, const OrbitEnclosure* orbit,
                       const ExponentClassification& cls) {
    BundleSample s;
    s.theta = theta;
    const Interval th(theta);
    if (orbit) s.base_point = orbit_point(*orbit, th);
    const MatrixFourierSeq Q = form.Q_enclosure();
    for (std::size_t j = 0; j < cls.pairs.size(); ++j) {
        const auto& p = cls.pairs[j];
        const std::string label = label_name(cls.labels[j]);
        if (p.kind == EigenPairEnclosure::Kind::ComplexPair && !(p.mu.im.lo > 0)) continue;
        auto w = apply_Q(Q, th, p.v);
        BundleDirection d{label, j, {}};
        if (p.kind == EigenPairEnclosure::Kind::Real) {
            for (const auto& c : w) d.w.push_back(c.re);
            s.directions.push_back(d);
        } else {
            BundleDirection di = d;
            d.label += "_re";
            di.label += "_im";
            for (const auto& c : w) {
                d.w.push_back(c.re);
                di.w.push_back(c.im);
            }
            s.directions.push_back(d);
            s.directions.push_back(di);
        }
    }
    return s;
}

std::vector<Interval> multipliers(const ExponentClassification& cls, const Interval& tau) {
    std::vector<Interval> out;
    for (const auto& l : cls.lyapunov) out.push_back(exp(l * tau));
    return out;
}

MultiplierSign multiplier_sign(const VerifiedFloquetForm& form, const EigenPairEnclosure& pair,
                               const SignOptions& opt) {
    MultiplierSign ms;
    if (pair.kind != EigenPairEnclosure::Kind::Real) return ms;
    const FloquetCandidate& x = form.x;
    const Eigen::Index n = Eigen::Index(x.n);
    const double tau = x.tau.mid();
    Eigen::MatrixXd Qt = x.Q1[0];
    for (std::size_t k = 1; k < x.m; ++k) Qt += (k % 2 == 0 ? 2.0 : -2.0) * x.Q1[k];
    Eigen::MatrixXd Phi = Qt * Eigen::MatrixXd(x.R * tau).exp();
    // Floating eigenvector of the midpoint R for the eigenvalue nearest the
    // enclosure center; the enclosure midpoint itself need not be one.
    Eigen::EigenSolver<Eigen::MatrixXd> es(x.R);
    const double target = pair.mu.re.mid();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < n; ++i)
        if (std::abs(es.eigenvalues()[i] - target) < std::abs(es.eigenvalues()[best] - target)) best = i;
    if (es.eigenvalues()[best].imag() != 0.0) return ms;
    const Eigen::VectorXd v = es.eigenvectors().col(best).real();
    Eigen::VectorXd a = Qt * v;
    Eigen::VectorXd b = Phi * a;
    const double amax = a.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::fabs(a[i]) > opt.small * amax) ms.ratios.push_back(b[i] / a[i]);
    if (ms.ratios.empty()) fail(ErrorCode::InconsistentRatios, "no usable components for the ratio");
    double sum = 0.0;
    for (double r : ms.ratios) sum += r;
    ms.ratio = sum / double(ms.ratios.size());
    for (double r : ms.ratios)
        if ((r > 0) != (ms.ratio > 0) || std::fabs(r - ms.ratio) > opt.rel_tol * std::fabs(ms.ratio))
            fail(ErrorCode::InconsistentRatios, "componentwise multiplier ratios disagree");
    ms.sign = ms.ratio > 0 ? 1 : -1;
    return ms;
}

BundleEnclosure sample_bundles(const VerifiedFloquetForm& form, const OrbitEnclosure* orbit,
                               const ExponentClassification& cls, int count) {
    if (count < 2) fail(ErrorCode::InvalidArgument, "bundle sampling needs at least 2 points");
    BundleEnclosure b;
    b.classification = cls;
    b.multipliers = multipliers(cls, form.x.tau);
    for (const auto& p : cls.pairs) {
        MultiplierSign ms;
        Orientation o = Orientation::Undetermined;
        if (p.kind == EigenPairEnclosure::Kind::Real) {
            try {
                ms = multiplier_sign(form, p);
                o = ms.sign < 0 ? Orientation::NonOrientable : Orientation::Orientable;
            } catch (const Error& e) {
                log_info(std::string("multiplier sign undetermined: ") + e.what());
            }
        }
        b.signs.push_back(ms);
        b.orientation.push_back(o);
    }
    const double tau = form.x.tau.mid();
    b.samples.resize(std::size_t(count));
    parallel_for(std::size_t(count), [&](std::size_t i) {
        double theta = i + 1 == std::size_t(count) ? tau : tau * double(i) / double(count - 1);
        b.samples[i] = bundle_at(theta, form, orbit, cls);
    });
    return b;
}

std::string bundles_csv(const BundleEnclosure& b) {
    std::ostringstream os;
    if (b.samples.empty()) return "";
    const auto& first = b.samples.front();
    os << "theta";
    for (std::size_t i = 0; i < first.base_point.size(); ++i) os << ",base_" << i + 1;
    for (std::size_t j = 0; j < first.directions.size(); ++j)
        for (std::size_t k = 0; k < first.directions[j].w.size(); ++k)
            os << ",w" << j + 1 << '_' << k + 1 << "_lo,w" << j + 1 << '_' << k + 1 << "_hi";
    os << '\n';
    for (const auto& s : b.samples) {
        os << shortest_decimal(s.theta);
        for (const auto& p : s.base_point) os << ',' << shortest_decimal(p.mid());
        for (const auto& d : s.directions)
            for (const auto& w : d.w) os << ',' << shortest_decimal(w.lo) << ',' << shortest_decimal(w.hi);
        os << '\n';
    }
    return os.str();
}

}  // namespace floquet
