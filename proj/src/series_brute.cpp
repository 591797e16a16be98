#include "gme/series_brute.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gme/parallel.hpp"
#include "gme/rng.hpp"
#include "gme/spectral.hpp"

namespace gme::brute {

namespace {

constexpr const char* kNames[kMomentCount] = {
    "aa", "bb", "aa2", "bb2", "aabb", "ab2", "ab2aa", "ab2bb", "ab4",
    "A",  "B",  "A2",  "B2",  "AB",   "aaA", "bbA",   "aaB",   "bbB",
    "ab2A", "ab2B", "F", "H", "J", "D", "M"};

bool needs_w(MomentName name) {
    switch (name) {
        case MomentName::A:
        case MomentName::B:
        case MomentName::A2:
        case MomentName::B2:
        case MomentName::AB:
        case MomentName::aaA:
        case MomentName::bbA:
        case MomentName::aaB:
        case MomentName::bbB:
        case MomentName::ab2A:
        case MomentName::ab2B:
        case MomentName::F:
        case MomentName::H:
        case MomentName::J:
        case MomentName::D:
        case MomentName::M:
            return true;
        default:
            return false;
    }
}

void require_nq(int n, int q) {
    if (n < 1) throw std::invalid_argument("moments: n must be >= 1");
    if (q < 2) throw std::invalid_argument("moments: q must be >= 2");
}

struct ChunkStat {
    double sum = 0.0;
    double sumsq = 0.0;
};

/// Scalar statistics of one sample stream; w-building scratch is reused
/// across samples.
class MomentSampler {
public:
    MomentSampler(MomentName name, int n, int q)
        : name_(name),
          n_(n),
          q_(q),
          with_w_(needs_w(name)),
          u_(static_cast<std::size_t>((q - 2) * n)),
          r_(static_cast<std::size_t>(n)),
          s_(static_cast<std::size_t>(n)),
          w_(static_cast<std::size_t>((q - 1) * n)) {
        if (with_w_) alpha_ = spectral::alpha_matrix(q);
    }

    double draw(Rng& rng) {
        if (with_w_) {
            for (auto& v : u_) v = rng.normal();
        }
        for (auto& v : r_) v = rng.normal();
        for (auto& v : s_) v = rng.normal();

        const double aa = dot(r_.data(), r_.data());
        const double bb = dot(s_.data(), s_.data());
        const double ab = dot(r_.data(), s_.data());

        double A = 0, B = 0, D = 0, F = 0, H = 0, M = 0, J = 0;
        if (with_w_ && q_ > 2) {
            build_w();
            for (int l = 0; l < q_ - 1; ++l) {
                const double* wl = &w_[static_cast<std::size_t>(l * n_)];
                const double ww = dot(wl, wl);
                const double wr = dot(wl, r_.data());
                const double wr2 = wr * wr;
                A += ww;
                B += wr2;
                D += ww * wr;
                F += ww * ww;
                H += ww * wr2;
                M += wr2 * wr;
                J += wr2 * wr2;
            }
        }

        switch (name_) {
            case MomentName::aa: return aa;
            case MomentName::bb: return bb;
            case MomentName::aa2: return aa * aa;
            case MomentName::bb2: return bb * bb;
            case MomentName::aabb: return aa * bb;
            case MomentName::ab2: return ab * ab;
            case MomentName::ab2aa: return ab * ab * aa;
            case MomentName::ab2bb: return ab * ab * bb;
            case MomentName::ab4: return ab * ab * ab * ab;
            case MomentName::A: return A;
            case MomentName::B: return B;
            case MomentName::A2: return A * A;
            case MomentName::B2: return B * B;
            case MomentName::AB: return A * B;
            case MomentName::aaA: return aa * A;
            case MomentName::bbA: return bb * A;
            case MomentName::aaB: return aa * B;
            case MomentName::bbB: return bb * B;
            case MomentName::ab2A: return ab * ab * A;
            case MomentName::ab2B: return ab * ab * B;
            case MomentName::F: return F;
            case MomentName::H: return H;
            case MomentName::J: return J;
            case MomentName::D: return D;
            case MomentName::M: return M;
        }
        throw std::logic_error("moment_mc: unknown name");
    }

private:
    double dot(const double* a, const double* b) const {
        double acc = 0.0;
        for (int i = 0; i < n_; ++i) acc += a[i] * b[i];
        return acc;
    }

    void build_w() {
        // w_{l,i} = sum_m alpha(l, m) u_{m,i}
        for (int l = 0; l < q_ - 1; ++l) {
            double* wl = &w_[static_cast<std::size_t>(l * n_)];
            for (int i = 0; i < n_; ++i) wl[i] = 0.0;
            for (int m = 0; m < q_ - 2; ++m) {
                const double c = alpha_(l, m);
                if (c == 0.0) continue;
                const double* um = &u_[static_cast<std::size_t>(m * n_)];
                for (int i = 0; i < n_; ++i) wl[i] += c * um[i];
            }
        }
    }

    MomentName name_;
    int n_, q_;
    bool with_w_;
    Eigen::MatrixXd alpha_;
    std::vector<double> u_, r_, s_, w_;
};

}  // namespace

const char* to_string(MomentName name) {
    return kNames[static_cast<int>(name)];
}

MomentName moment_from_string(const std::string& s) {
    for (int i = 0; i < kMomentCount; ++i)
        if (s == kNames[i]) return static_cast<MomentName>(i);
    throw std::invalid_argument("unknown moment name: " + s);
}

double alpha_quartic_sum(int q) {
    if (q < 2) throw std::invalid_argument("alpha_quartic_sum: q must be >= 2");
    if (q == 2) return 0.0;
    const Eigen::MatrixXd a = spectral::alpha_matrix(q);
    double total = 0.0;
    for (int l = 0; l < q - 1; ++l) {
        double t = 0.0;
        for (int m = 0; m < q - 2; ++m) t += a(l, m) * a(l, m);
        total += t * t;
    }
    return total;
}

double moment_closed_form(MomentName name, int n, int q) {
    require_nq(n, q);
    const double nd = n;
    const double qd = q;
    switch (name) {
        case MomentName::aa: return nd;
        case MomentName::bb: return nd;
        case MomentName::aa2: return nd * (nd + 2.0);
        case MomentName::bb2: return nd * (nd + 2.0);
        case MomentName::aabb: return nd * nd;
        case MomentName::ab2: return nd;
        case MomentName::ab2aa: return nd * (nd + 2.0);
        case MomentName::ab2bb: return nd * (nd + 2.0);
        case MomentName::ab4: return 3.0 * nd * (nd + 2.0);
        case MomentName::A: return nd * (qd - 2.0);
        case MomentName::B: return nd * (qd - 2.0);
        case MomentName::A2:
            return nd * nd * (qd - 2.0) * (qd - 2.0) + 2.0 * nd * (qd - 2.0);
        case MomentName::B2: return qd * (qd - 2.0) * nd * (nd + 2.0);
        case MomentName::AB:
            return nd * nd * (qd - 2.0) * (qd - 2.0) + 2.0 * nd * (qd - 2.0);
        case MomentName::aaA: return nd * nd * (qd - 2.0);
        case MomentName::bbA: return nd * nd * (qd - 2.0);
        case MomentName::aaB: return (qd - 2.0) * nd * (nd + 2.0);
        case MomentName::bbB: return (qd - 2.0) * nd * nd;
        case MomentName::ab2A: return (qd - 2.0) * nd * nd;
        case MomentName::ab2B: return (qd - 2.0) * nd * (nd + 2.0);
        case MomentName::F: return (nd * nd + 2.0 * nd) * alpha_quartic_sum(q);
        case MomentName::H: return nd * (nd + 2.0) * alpha_quartic_sum(q);
        case MomentName::J:
            return 3.0 * nd * (nd + 2.0) * alpha_quartic_sum(q);
        case MomentName::D: return 0.0;  // odd in r under sign flip
        case MomentName::M: return 0.0;
    }
    throw std::logic_error("moment_closed_form: unknown name");
}

MomentEstimate moment_mc(MomentName name, int n, int q, std::int64_t samples,
                         std::uint64_t seed) {
    require_nq(n, q);
    if (n > q) throw std::invalid_argument("moment_mc: requires n <= q");
    if (samples < 1000)
        throw std::invalid_argument("moment_mc: samples must be >= 1000");
    if (q == 2 && needs_w(name)) return MomentEstimate{0.0, 0.0};

    constexpr std::int64_t kChunk = 1 << 16;
    const std::int64_t nchunks = (samples + kChunk - 1) / kChunk;
    std::vector<ChunkStat> stats(static_cast<std::size_t>(nchunks));

    for_each_chunk(samples, kChunk,
                   [&](std::int64_t c, std::int64_t b, std::int64_t e) {
                       MomentSampler sampler(name, n, q);
                       Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
                       ChunkStat st;
                       for (std::int64_t k = b; k < e; ++k) {
                           const double v = sampler.draw(rng);
                           st.sum += v;
                           st.sumsq += v * v;
                       }
                       stats[static_cast<std::size_t>(c)] = st;
                   });

    double sum = 0.0, sumsq = 0.0;
    for (const auto& st : stats) {
        sum += st.sum;
        sumsq += st.sumsq;
    }
    const double nn = static_cast<double>(samples);
    const double mean = sum / nn;
    const double var = std::max(0.0, (sumsq - nn * mean * mean) / (nn - 1.0));
    return MomentEstimate{mean, std::sqrt(var / nn)};
}

SeriesCoefficients series_coefficients(int n, int q) {
    require_nq(n, q);
    auto e = [&](MomentName name) { return moment_closed_form(name, n, q); };
    const double qd = q;

    // 2q(q-1) c1 = -(q-1)A + (q-1)B + 2q aa - q bb + (q-1) ab^2
    const double c1_num = -(qd - 1.0) * e(MomentName::A) +
                          (qd - 1.0) * e(MomentName::B) +
                          2.0 * qd * e(MomentName::aa) -
                          qd * e(MomentName::bb) +
                          (qd - 1.0) * e(MomentName::ab2);
    const double c1 = c1_num / (2.0 * qd * (qd - 1.0));

    // 24 q^2 (q-1)^2 c2, term by term.
    const double q2 = qd * qd;
    const double q3 = q2 * qd;
    double c2_num = 0.0;
    c2_num += -3.0 * (qd - 1.0) * (qd - 1.0) * e(MomentName::A2);
    c2_num += -3.0 * e(MomentName::B2);
    c2_num += 12.0 * qd * e(MomentName::aaB);
    c2_num += 6.0 * qd * e(MomentName::B2);
    c2_num += -6.0 * qd * e(MomentName::bbB);
    c2_num += 3.0 * qd * e(MomentName::F);
    c2_num += -6.0 * qd * e(MomentName::H);
    c2_num += qd * e(MomentName::J);
    c2_num += -12.0 * q2 * e(MomentName::aa2);
    c2_num += -12.0 * q2 * e(MomentName::B);
    c2_num += -12.0 * q2 * e(MomentName::aaB);
    c2_num += -3.0 * q2 * e(MomentName::B2);
    c2_num += 12.0 * q2 * e(MomentName::aabb);
    c2_num += 6.0 * q2 * e(MomentName::bbB);
    c2_num += -3.0 * q2 * e(MomentName::bb2);
    c2_num += -6.0 * q2 * e(MomentName::F);
    c2_num += 12.0 * q2 * e(MomentName::H);
    c2_num += -2.0 * q2 * e(MomentName::J);
    c2_num += -12.0 * q3 * e(MomentName::aa);
    c2_num += 12.0 * q3 * e(MomentName::aa2);
    c2_num += 12.0 * q3 * e(MomentName::B);
    c2_num += 12.0 * q3 * e(MomentName::bb);
    c2_num += -12.0 * q3 * e(MomentName::aabb);
    c2_num += 3.0 * q3 * e(MomentName::bb2);
    c2_num += 3.0 * q3 * e(MomentName::F);
    c2_num += -6.0 * q3 * e(MomentName::H);
    c2_num += q3 * e(MomentName::J);
    c2_num += 6.0 * (qd - 1.0) *
              ((qd - 2.0) * e(MomentName::ab2A) +
               (qd - 1.0) * e(MomentName::AB) +
               2.0 * qd * e(MomentName::aaA) - qd * e(MomentName::bbA));
    c2_num += (q3 - 7.0 * q2 + 12.0 * qd - 6.0) * e(MomentName::ab4);
    c2_num += -6.0 * (qd - 1.0) *
              ((qd - 2.0) * e(MomentName::ab2B) -
               2.0 * qd * (qd - 2.0) * e(MomentName::ab2aa) +
               qd * (qd - 2.0) * e(MomentName::ab2bb) +
               4.0 * q2 * e(MomentName::ab2));
    const double c2 = c2_num / (24.0 * q2 * (qd - 1.0) * (qd - 1.0));

    const double c1_closed = n * (2.0 * qd - 1.0) / (2.0 * qd * (qd - 1.0));
    const double c2_closed = n * (n + qd) * (qd - 1.0) / (4.0 * q2);
    if (std::abs(c1 - c1_closed) > 1e-9 * std::abs(c1_closed) ||
        std::abs(c2 - c2_closed) > 1e-9 * std::abs(c2_closed))
        throw std::logic_error(
            "series_coefficients: assembled E[c1]/E[c2] disagree with the "
            "closed forms (transcription bug)");

    return SeriesCoefficients{c1, c2, n, q};
}

EntropyEstimate entropy_series(const MixtureConfig& config, int order) {
    config.validate();
    if (order < 0 || order > 2)
        throw std::invalid_argument("entropy_series: order must be 0, 1 or 2");
    if (config.n > config.q)
        throw std::invalid_argument(
            "entropy_series: requires n <= q; apply reduce_dimension first");

    const double n = config.n;
    const double q = config.q;
    const double mu = config.mu;
    const double base = n * config.h_sigma();

    const SeriesCoefficients c = series_coefficients(config.n, config.q);
    double direct = base;
    if (order >= 1) direct += 0.5 * n * (1.0 - 1.0 / q) * mu;
    if (order >= 2) direct -= c.c2_expect * mu * mu;

    // Same value assembled as n h_sigma + (n/2) q/(q-1) mu + S.
    double via_s = base;
    if (order >= 1) via_s += (0.5 * n * q / (q - 1.0) - c.c1_expect) * mu;
    if (order >= 2) via_s -= c.c2_expect * mu * mu;
    if (std::abs(direct - via_s) > 1e-12 * std::max(1.0, std::abs(direct)))
        throw std::logic_error("entropy_series: assembly routes disagree");

    EntropyEstimate est;
    est.value = direct;
    est.std_err = 0.0;
    est.method = Method::SeriesBrute;
    est.order = order;
    return est;
}

}  // namespace gme::brute
