#include "qcs/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <sstream>

#include "qcs/textio.hpp"

namespace qcs {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 40;
constexpr double kStepTolerance = 1e-10;

struct WeightedData {
    std::vector<double> t;
    std::vector<double> y; // observed success fraction
    std::vector<double> w; // 1 / var(y)
};

// Binomial weights with the variance floor: the per-draw variance term
// p(1-p) is never taken below 1/(4*trials), so points observed at 0 or 1
// keep a finite weight.
WeightedData weigh(const FringeDataset& data) {
    WeightedData wd;
    wd.t.reserve(data.points.size());
    wd.y.reserve(data.points.size());
    wd.w.reserve(data.points.size());
    for (const FringePoint& p : data.points) {
        const double phat = p.successes / p.trials;
        const double var_term = std::max(phat * (1.0 - phat), 0.25 / p.trials);
        wd.t.push_back(p.time);
        wd.y.push_back(phat);
        wd.w.push_back(p.trials / var_term);
    }
    return wd;
}

double model_p1(double t, double omega, double gamma) {
    return 0.5 * (1.0 - std::exp(-gamma * t) * std::cos(omega * t));
}

double chi2_of(const WeightedData& d, double omega, double gamma) {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        const double r = d.y[i] - model_p1(d.t[i], omega, gamma);
        chi2 += d.w[i] * r * r;
    }
    return chi2;
}

// Dominant discrete spectral peak of the mean-subtracted data, scanned on an
// oversampled grid up to the Nyquist rate of the closest point spacing.
double spectral_peak(const WeightedData& d) {
    const std::size_t n = d.t.size();
    double mean = 0.0;
    for (double y : d.y)
        mean += y;
    mean /= static_cast<double>(n);

    double max_dev = 0.0;
    for (double y : d.y)
        max_dev = std::max(max_dev, std::abs(y - mean));
    if (max_dev < 1e-9)
        throw FitError(FitErrorKind::Degenerate,
                       "fit_fringe: constant data, frequency unidentifiable");

    const double span = d.t.back() - d.t.front();
    double dt_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i)
        dt_min = std::min(dt_min, d.t[i] - d.t[i - 1]);

    const double omega_lo = 0.5 * kPi / span;
    const double omega_hi = kPi / dt_min;
    const double step = 2.0 * kPi / (8.0 * span);

    double best_omega = omega_lo;
    double best_power = -1.0;
    for (double omega = omega_lo; omega <= omega_hi; omega += step) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i)
            acc += (d.y[i] - mean) * std::polar(1.0, -omega * d.t[i]);
        const double power = std::norm(acc);
        if (power > best_power) {
            best_power = power;
            best_omega = omega;
        }
    }
    return best_omega;
}

struct Normal2 {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0; // J^T W J
    double g1 = 0.0, g2 = 0.0;              // J^T W r
};

Normal2 normal_equations(const WeightedData& d, double omega, double gamma) {
    Normal2 n;
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        const double t = d.t[i];
        const double vis = std::exp(-gamma * t);
        const double c = std::cos(omega * t);
        const double s = std::sin(omega * t);
        const double r = d.y[i] - 0.5 * (1.0 - vis * c);
        const double j_omega = 0.5 * t * vis * s;
        const double j_gamma = 0.5 * t * vis * c;
        n.a11 += d.w[i] * j_omega * j_omega;
        n.a12 += d.w[i] * j_omega * j_gamma;
        n.a22 += d.w[i] * j_gamma * j_gamma;
        n.g1 += d.w[i] * j_omega * r;
        n.g2 += d.w[i] * j_gamma * r;
    }
    return n;
}

} // namespace

void FringeDataset::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].trials < 1.0)
            throw std::invalid_argument("FringeDataset: trials must be >= 1");
        if (points[i].successes < 0.0 || points[i].successes > points[i].trials)
            throw std::invalid_argument("FringeDataset: successes outside [0, trials]");
        if (i > 0 && !(points[i].time > points[i - 1].time))
            throw std::invalid_argument("FringeDataset: times must be strictly increasing");
    }
}

FringeFit fit_fringe(const FringeDataset& data) {
    data.validate();
    if (data.points.size() < 5)
        throw FitError(FitErrorKind::InsufficientData, "fit_fringe: need at least 5 points");

    const WeightedData d = weigh(data);
    double omega = data.clock_hint ? std::abs(*data.clock_hint) : spectral_peak(d);
    if (!(omega > 0.0))
        throw FitError(FitErrorKind::Degenerate, "fit_fringe: nonpositive initial omega");

    const double span = d.t.back() - d.t.front();
    if (span * omega < 2.0 * kPi * (1.0 - 1e-9))
        throw FitError(FitErrorKind::InsufficientSpan,
                       "fit_fringe: data span below one fringe period");

    double gamma = 0.0;
    double chi2 = chi2_of(d, omega, gamma);
    int iterations = 0;
    for (; iterations < kMaxIterations; ++iterations) {
        const Normal2 n = normal_equations(d, omega, gamma);
        const double det = n.a11 * n.a22 - n.a12 * n.a12;
        if (!(std::abs(det) > 0.0))
            throw FitError(FitErrorKind::Degenerate, "fit_fringe: singular normal equations");
        const double d_omega = (n.a22 * n.g1 - n.a12 * n.g2) / det;
        const double d_gamma = (n.a11 * n.g2 - n.a12 * n.g1) / det;

        if (std::abs(d_omega) <= kStepTolerance * std::max(1.0, std::abs(omega)) &&
            std::abs(d_gamma) <= kStepTolerance * std::max(1.0, std::abs(gamma)))
            break;

        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h, lambda *= 0.5) {
            const double omega_try = omega + lambda * d_omega;
            const double gamma_try = gamma + lambda * d_gamma;
            if (!(omega_try > 0.0))
                continue;
            const double chi2_try = chi2_of(d, omega_try, gamma_try);
            if (chi2_try < chi2) {
                omega = omega_try;
                gamma = gamma_try;
                chi2 = chi2_try;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break; // no descent direction left at this scale
    }
    if (iterations == kMaxIterations)
        throw FitError(FitErrorKind::NoConvergence, "fit_fringe: no convergence after 100 iterations");

    const Normal2 n = normal_equations(d, omega, gamma);
    const double det = n.a11 * n.a22 - n.a12 * n.a12;
    if (!(det > 0.0))
        throw FitError(FitErrorKind::Degenerate, "fit_fringe: indefinite curvature at optimum");

    FringeFit fit;
    fit.omega = omega;
    fit.gamma = gamma;
    fit.omega_se = std::sqrt(n.a22 / det);
    fit.gamma_se = std::sqrt(n.a11 / det);
    fit.covariance = -n.a12 / det;
    fit.chi2 = chi2;
    fit.dof = static_cast<int>(data.points.size()) - 2;
    fit.iterations = iterations;
    if (fit.omega_se >= 0.5 * fit.omega)
        throw FitError(FitErrorKind::Degenerate, "fit_fringe: frequency unidentifiable");
    return fit;
}

PhaseFit fit_phase(const FringeDataset& data, double omega, double gamma_vis,
                   double vis_offset) {
    data.validate();
    if (data.points.empty())
        throw FitError(FitErrorKind::InsufficientData, "fit_phase: empty dataset");
    if (!(omega > 0.0))
        throw FitError(FitErrorKind::Degenerate, "fit_phase: nonpositive omega");

    const WeightedData d = weigh(data);
    std::vector<double> vis(d.t.size());
    for (std::size_t i = 0; i < d.t.size(); ++i)
        vis[i] = std::exp(-gamma_vis * (d.t[i] + vis_offset));

    auto chi2_at = [&](double phase) {
        double chi2 = 0.0;
        for (std::size_t i = 0; i < d.t.size(); ++i) {
            const double r = d.y[i] - 0.5 * (1.0 - vis[i] * std::cos(omega * d.t[i] + phase));
            chi2 += d.w[i] * r * r;
        }
        return chi2;
    };

    // Coarse scan keeps Gauss-Newton out of the antipodal local minimum.
    double phase = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 32; ++k) {
        const double candidate = -kPi + (2.0 * kPi) * (k + 0.5) / 32.0;
        const double c = chi2_at(candidate);
        if (c < best) {
            best = c;
            phase = candidate;
        }
    }

    double chi2 = best;
    int iterations = 0;
    double curvature = 0.0;
    for (; iterations < kMaxIterations; ++iterations) {
        double jwj = 0.0, jwr = 0.0;
        for (std::size_t i = 0; i < d.t.size(); ++i) {
            const double s = std::sin(omega * d.t[i] + phase);
            const double c = std::cos(omega * d.t[i] + phase);
            const double r = d.y[i] - 0.5 * (1.0 - vis[i] * c);
            const double j = 0.5 * vis[i] * s;
            jwj += d.w[i] * j * j;
            jwr += d.w[i] * j * r;
        }
        curvature = jwj;
        if (!(jwj > 0.0))
            throw FitError(FitErrorKind::Degenerate, "fit_phase: no phase information");
        const double step = jwr / jwj;
        if (std::abs(step) <= kStepTolerance)
            break;
        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h, lambda *= 0.5) {
            const double trial = phase + lambda * step;
            const double chi2_try = chi2_at(trial);
            if (chi2_try < chi2) {
                phase = trial;
                chi2 = chi2_try;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
    }
    if (iterations == kMaxIterations)
        throw FitError(FitErrorKind::NoConvergence, "fit_phase: no convergence after 100 iterations");

    PhaseFit fit;
    fit.phase = std::remainder(phase, 2.0 * kPi);
    fit.phase_se = 1.0 / std::sqrt(curvature);
    fit.chi2 = chi2;
    fit.iterations = iterations;
    return fit;
}

void write_fringe_dataset(std::ostream& out, const FringeDataset& data) {
    out << "# fringe dataset: time successes trials\n";
    if (data.clock_hint)
        out << "# hint " << fmt_double(*data.clock_hint) << "\n";
    for (const FringePoint& p : data.points)
        out << fmt_double(p.time) << " " << fmt_double(p.successes) << " "
            << fmt_double(p.trials) << "\n";
}

FringeDataset read_fringe_dataset(std::istream& in) {
    FringeDataset data;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '#') {
            std::istringstream fields{std::string(t.substr(1))};
            std::string word;
            if (fields >> word && word == "hint") {
                std::string value;
                if (fields >> value)
                    data.clock_hint = parse_double(value);
            }
            continue;
        }
        std::istringstream fields{std::string(t)};
        std::string time_s, succ_s, trials_s;
        if (!(fields >> time_s >> succ_s >> trials_s))
            throw std::runtime_error("fringe dataset line " + std::to_string(line_no) +
                                     ": expected 'time successes trials'");
        data.points.push_back(
            {parse_double(time_s), parse_double(succ_s), parse_double(trials_s)});
    }
    data.validate();
    return data;
}

void write_fringe_dataset_file(const std::string& path, const FringeDataset& data) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_fringe_dataset(out, data);
}

FringeDataset read_fringe_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    return read_fringe_dataset(in);
}

} // namespace qcs
