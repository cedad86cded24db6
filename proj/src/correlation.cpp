#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "bkhm/error.hpp"
#include "bkhm/operators.hpp"
#include "bkhm/parallel.hpp"
#include "bkhm/statistics.hpp"
#include "bkhm/transform.hpp"
#include "fftw_support.hpp"

namespace bkhm {

SnapshotFields snapshot_fields(const SpectralField& omega) {
    auto u = velocity_from_vorticity(omega);
    return {std::move(u.u1), std::move(u.u2), transform_inverse(omega)};
}

namespace {

using std::numbers::pi;

// ---- monomials in (u1, u2, w) up to degree 3 -------------------------------

constexpr int U1 = 0, U2 = 1, W = 2;
constexpr int ONE = 0;

int mono(std::initializer_list<int> syms) {
    int c[3] = {0, 0, 0};
    for (int s : syms) ++c[s];
    return c[0] + 4 * c[1] + 16 * c[2];
}

struct Term {
    double coef;
    int a, b;  // A side carries the region indicator; b = ONE is the all-ones lattice
};

struct Component {
    int p1, p2;  // direction weight n1^p1 n2^p2
    std::vector<Term> terms;
};

struct KindPlan {
    SeriesKind kind;
    double scale = 1.0;
    int l_power = 0;
    std::vector<Component> comps;
};

Component& component(KindPlan& k, int p1, int p2) {
    for (auto& c : k.comps)
        if (c.p1 == p1 && c.p2 == p2) return c;
    k.comps.push_back({p1, p2, {}});
    return k.comps.back();
}

void add_term(Component& c, double coef, int a, int b) {
    for (auto& t : c.terms)
        if (t.a == a && t.b == b) {
            t.coef += coef;
            return;
        }
    c.terms.push_back({coef, a, b});
}

// Every cubic kind is expanded into correlations R(A, B)(y) = sum_x chi A(x) B(x+y)
// of monomials, so one lattice FFT per monomial serves all kinds.
KindPlan plan_for(SeriesKind kind, double beta) {
    KindPlan k;
    k.kind = kind;
    switch (kind) {
        case SeriesKind::GammaBar: {
            auto& c = component(k, 0, 0);
            add_term(c, 1, mono({U1}), mono({U1}));
            add_term(c, 1, mono({U2}), mono({U2}));
            break;
        }
        case SeriesKind::CThetaBar: {
            // trace Theta(l n) = (beta/2) l n2 [u2(x) u1(x+ln) - u1(x) u2(x+ln)]
            k.scale = 0.5 * beta;
            k.l_power = 1;
            auto& c = component(k, 0, 1);
            add_term(c, 1, mono({U2}), mono({U1}));
            add_term(c, -1, mono({U1}), mono({U2}));
            break;
        }
        case SeriesKind::FrakCBar:
            add_term(component(k, 0, 0), 1, mono({W}), mono({W}));
            break;
        case SeriesKind::FrakQBar: {
            k.scale = 0.5 * beta;
            auto& c = component(k, 0, 0);
            add_term(c, 1, mono({U2}), mono({W}));
            add_term(c, 1, mono({W}), mono({U2}));
            break;
        }
        case SeriesKind::DBar:
            // |du|^2 du.n with du = u' - u, u' = u(x + ln)
            for (int j : {U1, U2}) {
                auto& c = component(k, j == U1, j == U2);
                for (int i : {U1, U2}) {
                    add_term(c, 1, ONE, mono({i, i, j}));
                    add_term(c, -1, mono({j}), mono({i, i}));
                    add_term(c, -2, mono({i}), mono({i, j}));
                    add_term(c, 2, mono({i, j}), mono({i}));
                    add_term(c, 1, mono({i, i}), mono({j}));
                    add_term(c, -1, mono({i, i, j}), ONE);
                }
            }
            break;
        case SeriesKind::FrakDBar:
        case SeriesKind::S3MixedLongitudinal:
            for (int j : {U1, U2}) {
                auto& c = component(k, j == U1, j == U2);
                add_term(c, 1, ONE, mono({W, W, j}));
                add_term(c, -1, mono({j}), mono({W, W}));
                add_term(c, -2, mono({W}), mono({W, j}));
                add_term(c, 2, mono({W, j}), mono({W}));
                add_term(c, 1, mono({W, W}), mono({j}));
                add_term(c, -1, mono({W, W, j}), ONE);
            }
            break;
        case SeriesKind::S3Longitudinal:
            // (du.n)^3 = n_i n_j n_k (u'_i - u_i)(u'_j - u_j)(u'_k - u_k)
            for (int i : {U1, U2})
                for (int j : {U1, U2})
                    for (int l : {U1, U2}) {
                        const int p1 = (i == U1) + (j == U1) + (l == U1);
                        auto& c = component(k, p1, 3 - p1);
                        add_term(c, 1, ONE, mono({i, j, l}));
                        add_term(c, -3, mono({l}), mono({i, j}));
                        add_term(c, 3, mono({j, l}), mono({i}));
                        add_term(c, -1, mono({i, j, l}), ONE);
                    }
            break;
        case SeriesKind::ABar:
        case SeriesKind::FrakABar:
            throw ValidationError("forcing correlations are not built from snapshots");
    }
    return k;
}

// ---- padded lattice ---------------------------------------------------------

struct LatticePlans {
    fftw_plan r2c, c2r;
    LatticePlans(int rows, int cols) {
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::vector<double> r(static_cast<std::size_t>(rows) * cols);
        std::vector<fftw_complex> c(static_cast<std::size_t>(rows) * (cols / 2 + 1));
        r2c = fftw_plan_dft_r2c_2d(rows, cols, r.data(), c.data(), flags);
        c2r = fftw_plan_dft_c2r_2d(rows, cols, c.data(), r.data(), flags | FFTW_DESTROY_INPUT);
    }
    ~LatticePlans() {
        fftw_destroy_plan(r2c);
        fftw_destroy_plan(c2r);
    }
    LatticePlans(const LatticePlans&) = delete;
    LatticePlans& operator=(const LatticePlans&) = delete;
};

const LatticePlans& lattice_plans(int rows, int cols) {
    static std::map<std::pair<int, int>, std::unique_ptr<LatticePlans>> cache;
    std::lock_guard lock(detail::fftw_planner_mutex());
    auto key = std::make_pair(rows, cols);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<LatticePlans>(rows, cols)).first;
    return *it->second;
}

using Spectrum = std::vector<cplx>;

class Lattice {
public:
    Lattice(const ChannelGrid& g, int pad, Region region, double margin)
        : g_(g), pad_(pad), rows_(pad * (g.N2() + 1)), cols_(g.N1()), half_(g.N1() / 2 + 1), region_(region) {
        if (pad < 2) throw ValidationError("analysis.pad_factor must be >= 2");
        chi_.assign(rows_, region == Region::Extended ? 1.0 : 0.0);
        if (region == Region::Interior) {
            int count = 0;
            for (int r = 1; r <= g.N2(); ++r) {
                const double lo = r * g.dx2(), hi = (g.N2() + 1 - r) * g.dx2();
                if (lo >= margin - 1e-12 * g.dx2() && hi >= margin - 1e-12 * g.dx2()) {
                    chi_[r] = 1.0;
                    ++count;
                }
            }
            if (count == 0) throw ValidationError("analysis: interior window is empty for this separation range");
            norm_area_ = count * g.dx2() * g.L();
        } else {
            norm_area_ = g.area();
        }
        // exact-zero-extension range: x + y may not wrap onto the strip
        max_shift_ = (rows_ - g.N2() - 1) * g.dx2();
    }

    int rows() const { return rows_; }
    int half() const { return half_; }
    std::size_t spectrum_size() const { return static_cast<std::size_t>(rows_) * half_; }
    double max_shift() const { return max_shift_; }
    double norm_area() const { return norm_area_; }
    // (cell area / normalising area) / lattice size
    double factor() const { return g_.cell_area() / norm_area_ / (static_cast<double>(rows_) * cols_); }
    bool shared_sides() const { return region_ == Region::Extended; }

    // Lattice samples of a monomial; side A multiplies by the region indicator.
    std::vector<double> build(const SnapshotFields& f, int m, bool side_a) const {
        std::vector<double> v(static_cast<std::size_t>(rows_) * cols_, 0.0);
        if (m == ONE) {
            for (int r = 0; r < rows_; ++r)
                std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(r) * cols_, cols_, side_a ? chi_[r] : 1.0);
            return v;
        }
        const int c1 = m % 4, c2 = (m / 4) % 4, cw = m / 16;
        for (int r = 1; r <= g_.N2(); ++r) {
            const double chi = side_a ? chi_[r] : 1.0;
            if (chi == 0.0) continue;
            const std::size_t src = static_cast<std::size_t>(r - 1) * cols_;
            double* dst = v.data() + static_cast<std::size_t>(r) * cols_;
            for (int i = 0; i < cols_; ++i) {
                double p = chi;
                for (int e = 0; e < c1; ++e) p *= f.u1.values[src + i];
                for (int e = 0; e < c2; ++e) p *= f.u2.values[src + i];
                for (int e = 0; e < cw; ++e) p *= f.w.values[src + i];
                dst[i] = p;
            }
        }
        return v;
    }

    Spectrum fft(std::vector<double> v) const {
        Spectrum out(spectrum_size());
        fftw_execute_dft_r2c(lattice_plans(rows_, cols_).r2c, v.data(), reinterpret_cast<fftw_complex*>(out.data()));
        return out;
    }

    // Periodic lattice correlation sums (times the lattice size) at integer lags.
    std::vector<double> lags(const Spectrum& p) const {
        Spectrum tmp = p;
        std::vector<double> out(static_cast<std::size_t>(rows_) * cols_);
        fftw_execute_dft_c2r(lattice_plans(rows_, cols_).c2r, reinterpret_cast<fftw_complex*>(tmp.data()),
                             out.data());
        return out;
    }

    // Phase factors for a shift (y1, y2).
    struct Phases {
        std::vector<cplx> ex, ey;
    };
    Phases phases(double y1, double y2) const {
        Phases ph{std::vector<cplx>(half_), std::vector<cplx>(rows_)};
        const double k1 = 2 * pi / g_.L();
        for (int k = 0; k < half_; ++k) {
            const double a = k1 * k * y1;
            ph.ex[k] = 2 * k == cols_ ? cplx(std::cos(a), 0.0) : cplx(std::cos(a), std::sin(a));
        }
        const double k2 = 2 * pi / (rows_ * g_.dx2());
        for (int k = 0; k < rows_; ++k) {
            const int ks = k <= rows_ / 2 ? k : k - rows_;
            const double a = k2 * ks * y2;
            ph.ey[k] = 2 * k == rows_ ? cplx(std::cos(a), 0.0) : cplx(std::cos(a), std::sin(a));
        }
        return ph;
    }

    // sum_K conj(A) B e^{iK.y} over the full spectrum, from the half spectrum.
    double trig(const Spectrum& p, const Phases& ph, std::vector<cplx>& scratch) const {
        scratch.assign(half_, cplx{});
        for (int r = 0; r < rows_; ++r) {
            const cplx e = ph.ey[r];
            const cplx* row = p.data() + static_cast<std::size_t>(r) * half_;
            for (int k = 0; k < half_; ++k) scratch[k] += row[k] * e;
        }
        double s = 0.0;
        for (int k = 0; k < half_; ++k) {
            const double w = (k == 0 || 2 * k == cols_) ? 1.0 : 2.0;
            s += w * (scratch[k] * ph.ex[k]).real();
        }
        return s;
    }

    double bilinear(const std::vector<double>& r, double y1, double y2) const {
        const double f1 = y1 / g_.dx1(), f2 = y2 / g_.dx2();
        const double i0 = std::floor(f1), j0 = std::floor(f2);
        const double t1 = f1 - i0, t2 = f2 - j0;
        auto at = [&](long i, long j) {
            const long ii = ((i % cols_) + cols_) % cols_;
            const long jj = ((j % rows_) + rows_) % rows_;
            return r[static_cast<std::size_t>(jj) * cols_ + ii];
        };
        const long i = static_cast<long>(i0), j = static_cast<long>(j0);
        // skip zero-weight corners so exact lags reproduce the lattice value bitwise
        double s = 0.0;
        if ((1 - t1) * (1 - t2) != 0.0) s += (1 - t1) * (1 - t2) * at(i, j);
        if (t1 * (1 - t2) != 0.0) s += t1 * (1 - t2) * at(i + 1, j);
        if ((1 - t1) * t2 != 0.0) s += (1 - t1) * t2 * at(i, j + 1);
        if (t1 * t2 != 0.0) s += t1 * t2 * at(i + 1, j + 1);
        return s;
    }

private:
    ChannelGrid g_;
    int pad_, rows_, cols_, half_;
    Region region_;
    std::vector<double> chi_;
    double norm_area_ = 0.0;
    double max_shift_ = 0.0;
};

// FFTs of every monomial a set of plans needs, for one snapshot.
class MonoSpectra {
public:
    MonoSpectra(const Lattice& lat, const SnapshotFields& f) : lat_(lat), f_(f) {}
    const Spectrum& get(int m, bool side_a) {
        const bool a = side_a && !lat_.shared_sides();
        const int key = 2 * m + (a ? 1 : 0);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, lat_.fft(lat_.build(f_, m, a))).first;
        return it->second;
    }

private:
    const Lattice& lat_;
    const SnapshotFields& f_;
    std::map<int, Spectrum> cache_;
};

void accumulate(const KindPlan& plan, MonoSpectra& ms, std::vector<Spectrum>& acc) {
    for (std::size_t c = 0; c < plan.comps.size(); ++c) {
        auto& out = acc[c];
        for (const auto& t : plan.comps[c].terms) {
            if (t.coef == 0.0) continue;
            const auto& fa = ms.get(t.a, true);
            const auto& fb = ms.get(t.b, false);
            for (std::size_t n = 0; n < out.size(); ++n) out[n] += t.coef * std::conj(fa[n]) * fb[n];
        }
    }
}

double ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

void check_fields(const ChannelGrid& g, const SnapshotFields& f) {
    if (!(f.u1.grid == g) || !(f.u2.grid == g) || !(f.w.grid == g))
        throw GridMismatchError("snapshot grid does not match the analysis grid");
}

void check_range(const Lattice& lat, double lmax) {
    if (lmax > lat.max_shift()) {
        std::ostringstream os;
        os << "separation " << lmax << " exceeds the padded range " << lat.max_shift()
           << " (increase analysis.pad_factor)";
        throw ValidationError(os.str());
    }
}

double resolve_margin(const ChannelGrid& g, const StatisticsOptions& opts, double lmax) {
    return opts.interior_margin >= 0.0 ? opts.interior_margin : lmax + g.dx2();
}

}  // namespace

// ---- accumulator -------------------------------------------------------------

struct SeriesAccumulator::Impl {
    ChannelGrid grid;
    SeparationGrid sep;
    std::vector<SeriesKind> kinds;
    StatisticsOptions opts;
    std::int64_t expected;
    Lattice lat;
    std::vector<KindPlan> plans;  // one per kind (in request order)

    // current block
    int block = -1;
    std::int64_t block_count = 0;
    std::vector<std::vector<Spectrum>> acc;  // [kind][component]

    // finished blocks: values[kind][l] (l index -1 == origin stored at back)
    std::vector<std::int64_t> counts;
    std::vector<std::vector<std::vector<double>>> block_values;  // [block][kind][l + origin]
    std::int64_t total = 0;

    Impl(const ChannelGrid& g, SeparationGrid s, std::vector<SeriesKind> k, StatisticsOptions o, std::int64_t e)
        : grid(g), sep(std::move(s)), kinds(std::move(k)), opts(o), expected(e),
          lat(g, o.pad_factor, o.region, resolve_margin(g, o, sep.lengths.empty() ? 0.0 : sep.max())) {
        if (sep.lengths.empty()) throw ValidationError("analysis: empty separation grid");
        if (expected < 1) throw ValidationError("analysis: expected snapshot count must be >= 1");
        if (opts.n_blocks < 1) throw ValidationError("analysis: n_blocks must be >= 1");
        check_range(lat, sep.max());
        for (auto kd : kinds) {
            if (!is_snapshot_kind(kd))
                throw ValidationError("kind " + std::string(kind_name(kd)) + " is not computed from snapshots");
            plans.push_back(plan_for(kd, opts.beta));
        }
    }

    void reset_block() {
        acc.assign(plans.size(), {});
        for (std::size_t k = 0; k < plans.size(); ++k)
            acc[k].assign(plans[k].comps.size(), Spectrum(lat.spectrum_size(), cplx{}));
        block_count = 0;
    }

    void close_block() {
        if (block_count == 0) return;
        const double norm = lat.factor() / static_cast<double>(block_count);
        const std::size_t nl = sep.lengths.size();
        std::vector<std::vector<double>> vals(plans.size(), std::vector<double>(nl + 1, 0.0));

        // bilinear mode works from the integer-lag correlations
        std::vector<std::vector<std::vector<double>>> lagged;
        if (opts.interp == Interpolation::Bilinear) {
            lagged.resize(plans.size());
            for (std::size_t k = 0; k < plans.size(); ++k)
                for (const auto& sp : acc[k]) lagged[k].push_back(lat.lags(sp));
        }

        parallel_for(nl + 1, [&](std::size_t li) {
            const double l = li < nl ? sep.lengths[li] : 0.0;
            std::vector<cplx> scratch;
            std::vector<double> sum(plans.size(), 0.0);
            for (int d = 0; d < sep.n_dirs; ++d) {
                const double th = sep.angle(d);
                const double n1 = std::cos(th), n2 = std::sin(th);
                const double y1 = l * n1, y2 = l * n2;
                Lattice::Phases ph;
                if (opts.interp == Interpolation::Trigonometric) ph = lat.phases(y1, y2);
                for (std::size_t k = 0; k < plans.size(); ++k) {
                    double v = 0.0;
                    for (std::size_t c = 0; c < plans[k].comps.size(); ++c) {
                        const auto& comp = plans[k].comps[c];
                        const double r = opts.interp == Interpolation::Trigonometric
                                             ? lat.trig(acc[k][c], ph, scratch)
                                             : lat.bilinear(lagged[k][c], y1, y2);
                        v += ipow(n1, comp.p1) * ipow(n2, comp.p2) * r;
                    }
                    sum[k] += v;
                }
            }
            for (std::size_t k = 0; k < plans.size(); ++k)
                vals[k][li] = plans[k].scale * ipow(l, plans[k].l_power) * norm * sum[k] / sep.n_dirs;
        });
        block_values.push_back(std::move(vals));
        counts.push_back(block_count);
        block_count = 0;
    }

    void add(const SnapshotFields& f) {
        check_fields(grid, f);
        const int b = static_cast<int>(std::min<std::int64_t>(opts.n_blocks - 1, total * opts.n_blocks / expected));
        if (b != block) {
            close_block();
            reset_block();
            block = b;
        }
        MonoSpectra ms(lat, f);
        for (std::size_t k = 0; k < plans.size(); ++k) accumulate(plans[k], ms, acc[k]);
        ++block_count;
        ++total;
    }

    std::vector<DiagnosticSeries> finish() {
        close_block();
        if (total == 0) throw ValidationError("analysis: no snapshots");
        std::vector<DiagnosticSeries> out;
        const std::size_t nl = sep.lengths.size();
        for (std::size_t k = 0; k < plans.size(); ++k) {
            DiagnosticSeries s;
            s.kind = kinds[k];
            s.grid = sep;
            s.n_samples = total;
            s.values.assign(nl, 0.0);
            s.std_error.assign(nl, 0.0);
            for (std::size_t li = 0; li <= nl; ++li) {
                double mean = 0.0;
                for (std::size_t b = 0; b < counts.size(); ++b)
                    mean += static_cast<double>(counts[b]) * block_values[b][k][li];
                mean /= static_cast<double>(total);
                double se = 0.0;
                const std::size_t nb = counts.size();
                if (nb >= 2) {
                    double bm = 0.0;
                    for (std::size_t b = 0; b < nb; ++b) bm += block_values[b][k][li];
                    bm /= static_cast<double>(nb);
                    double var = 0.0;
                    for (std::size_t b = 0; b < nb; ++b) var += std::pow(block_values[b][k][li] - bm, 2);
                    se = std::sqrt(var / static_cast<double>(nb - 1) / static_cast<double>(nb));
                }
                if (li < nl) {
                    s.values[li] = mean;
                    s.std_error[li] = se;
                } else {
                    s.origin = mean;
                    s.origin_std_error = se;
                }
            }
            out.push_back(std::move(s));
        }
        return out;
    }
};

SeriesAccumulator::SeriesAccumulator(const ChannelGrid& g, SeparationGrid sep, std::vector<SeriesKind> kinds,
                                     StatisticsOptions opts, std::int64_t expected_snapshots)
    : impl_(new Impl(g, std::move(sep), std::move(kinds), opts, expected_snapshots)) {}

SeriesAccumulator::~SeriesAccumulator() { delete impl_; }

void SeriesAccumulator::add(const SpectralField& omega) {
    if (!(omega.grid == impl_->grid)) throw GridMismatchError("snapshot grid does not match the analysis grid");
    impl_->add(snapshot_fields(omega));
}

void SeriesAccumulator::add(const SnapshotFields& f) { impl_->add(f); }

std::int64_t SeriesAccumulator::count() const { return impl_->total; }

std::vector<DiagnosticSeries> SeriesAccumulator::finish() { return impl_->finish(); }

// ---- one-off evaluations -----------------------------------------------------

double directional_statistic(SeriesKind kind, const SnapshotFields& f, double l, double n1, double n2,
                             const StatisticsOptions& opts) {
    const auto& g = f.w.grid;
    check_fields(g, f);
    Lattice lat(g, opts.pad_factor, opts.region, resolve_margin(g, opts, l));
    check_range(lat, l);
    const auto plan = plan_for(kind, opts.beta);
    std::vector<Spectrum> acc(plan.comps.size(), Spectrum(lat.spectrum_size(), cplx{}));
    MonoSpectra ms(lat, f);
    accumulate(plan, ms, acc);
    const double y1 = l * n1, y2 = l * n2;
    double v = 0.0;
    std::vector<cplx> scratch;
    const auto ph = lat.phases(y1, y2);
    for (std::size_t c = 0; c < plan.comps.size(); ++c) {
        const double r = opts.interp == Interpolation::Trigonometric ? lat.trig(acc[c], ph, scratch)
                                                                      : lat.bilinear(lat.lags(acc[c]), y1, y2);
        v += ipow(n1, plan.comps[c].p1) * ipow(n2, plan.comps[c].p2) * r;
    }
    return plan.scale * ipow(l, plan.l_power) * lat.factor() * v;
}

double lattice_correlation(const PhysicalField& a, const PhysicalField& b, double y1, double y2,
                           Interpolation interp, int pad_factor) {
    if (!(a.grid == b.grid)) throw GridMismatchError("lattice_correlation: grids differ");
    const auto& g = a.grid;
    Lattice lat(g, pad_factor, Region::Extended, 0.0);
    check_range(lat, std::abs(y2));
    auto fa = extend_by_zero(a, pad_factor);
    auto fb = extend_by_zero(b, pad_factor);
    const auto sa = lat.fft(std::move(fa.values));
    const auto sb = lat.fft(std::move(fb.values));
    Spectrum p(sa.size());
    for (std::size_t n = 0; n < p.size(); ++n) p[n] = std::conj(sa[n]) * sb[n];
    std::vector<cplx> scratch;
    const double r =
        interp == Interpolation::Trigonometric ? lat.trig(p, lat.phases(y1, y2), scratch) : lat.bilinear(lat.lags(p), y1, y2);
    return lat.factor() * r;
}

}  // namespace bkhm
