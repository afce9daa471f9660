#include "musical/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "musical/parallel.hpp"

namespace musical {

namespace {

constexpr double kPi = std::numbers::pi;

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

enum Purpose : std::uint64_t { kGeometry = 1, kEmission = 2, kDetector = 3 };

std::size_t draw_count(double expected, CountMode mode, std::mt19937_64& rng) {
    if (!(expected > 0.0)) throw Error("zero-measure geometry or non-positive density");
    if (mode == CountMode::poisson) return std::poisson_distribution<std::size_t>(expected)(rng);
    return static_cast<std::size_t>(std::llround(expected));
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string(what) + " must be positive");
}

Emitter cross(const Emitter& a, const Emitter& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

Emitter normalized(const Emitter& v) {
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    return {v.x / n, v.y / n, v.z / n};
}

void add_tube(const Segment3& axis, double radius, std::size_t count, std::mt19937_64& rng, std::vector<Emitter>& out) {
    const Emitter d{axis.to.x - axis.from.x, axis.to.y - axis.from.y, axis.to.z - axis.from.z};
    const Emitter dir = normalized(d);
    const Emitter helper = std::abs(dir.z) < 0.9 ? Emitter{0, 0, 1} : Emitter{1, 0, 0};
    const Emitter e1 = normalized(cross(dir, helper));
    const Emitter e2 = cross(dir, e1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = unit(rng);
        const double phi = 2.0 * kPi * unit(rng);
        const double c = radius * std::cos(phi);
        const double s = radius * std::sin(phi);
        out.push_back({axis.from.x + t * d.x + c * e1.x + s * e2.x, axis.from.y + t * d.y + c * e1.y + s * e2.y,
                       axis.from.z + t * d.z + c * e1.z + s * e2.z});
    }
}

/// Separable splat of one emitter's expected pixel energy fractions, scaled by `photons`.
void splat(const PsfModel& psf, const Emitter& e, double photons, const DetectorSpec& det, double* frame) {
    const double px = det.pixel_size_nm;
    const double reach = psf.support_radius_nm(e.z);
    const int c0 = std::max(0, static_cast<int>(std::floor((e.x - reach) / px)));
    const int c1 = std::min(det.width - 1, static_cast<int>(std::floor((e.x + reach) / px)));
    const int r0 = std::max(0, static_cast<int>(std::floor((e.y - reach) / px)));
    const int r1 = std::min(det.height - 1, static_cast<int>(std::floor((e.y + reach) / px)));
    if (c0 > c1 || r0 > r1) return;
    const double scale = photons * px * px / psf.integrated_intensity_nm2();

    if (psf.kind == PsfKind::gaussian) {
        const double s = psf.defocused_sigma_nm(e.z);
        const double s0 = psf.gaussian_sigma_nm();
        const double peak = scale * (s0 * s0) / (s * s);
        const double inv2s2 = 1.0 / (2.0 * s * s);
        std::vector<double> wx(static_cast<std::size_t>(c1 - c0 + 1));
        for (int c = c0; c <= c1; ++c) {
            const double dx = (c + 0.5) * px - e.x;
            wx[static_cast<std::size_t>(c - c0)] = std::exp(-dx * dx * inv2s2);
        }
        for (int r = r0; r <= r1; ++r) {
            const double dy = (r + 0.5) * px - e.y;
            const double wy = peak * std::exp(-dy * dy * inv2s2);
            double* row = frame + static_cast<std::size_t>(r) * det.width;
            for (int c = c0; c <= c1; ++c) row[c] += wy * wx[static_cast<std::size_t>(c - c0)];
        }
        return;
    }
    for (int r = r0; r <= r1; ++r) {
        double* row = frame + static_cast<std::size_t>(r) * det.width;
        for (int c = c0; c <= c1; ++c)
            row[c] += scale * psf.intensity((c + 0.5) * px - e.x, (r + 0.5) * px - e.y, e.z);
    }
}

}  // namespace

std::string to_string(SceneKind kind) {
    switch (kind) {
        case SceneKind::lines_crossing: return "lines_crossing";
        case SceneKind::two_circles: return "two_circles";
        case SceneKind::vesicles: return "vesicles";
        case SceneKind::microtubules_debris: return "microtubules_debris";
        case SceneKind::mitochondria: return "mitochondria";
        case SceneKind::custom: return "custom";
    }
    return "custom";
}

SceneKind parse_scene_kind(const std::string& name) {
    if (name == "lines" || name == "lines_crossing") return SceneKind::lines_crossing;
    if (name == "circles" || name == "two_circles") return SceneKind::two_circles;
    if (name == "vesicles") return SceneKind::vesicles;
    if (name == "microtubules" || name == "microtubules_debris") return SceneKind::microtubules_debris;
    if (name == "mitochondria") return SceneKind::mitochondria;
    throw Error("unknown scene '" + name + "'");
}

Scene make_lines_crossing(const LinesCrossingSpec& spec, std::uint64_t seed, CountMode mode) {
    require_positive(spec.length_nm, "line length");
    require_positive(spec.density_per_um, "line density");
    if (!(spec.angle_deg > 0.0 && spec.angle_deg < 180.0)) throw Error("crossing angle must be in (0, 180) degrees");
    auto rng = substream(seed, kGeometry, 0);
    Scene scene;
    scene.kind = SceneKind::lines_crossing;
    const double half = spec.angle_deg * kPi / 360.0;
    std::uniform_real_distribution<double> along(-0.5 * spec.length_nm, 0.5 * spec.length_nm);
    for (int sign : {-1, 1}) {
        const double cx = std::cos(half), cy = sign * std::sin(half);
        const std::size_t n = draw_count(spec.density_per_um * spec.length_nm / 1000.0, mode, rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = along(rng);
            scene.emitters.push_back({spec.center.x + t * cx, spec.center.y + t * cy, 0.0});
        }
    }
    scene.params = {{"center_x_nm", spec.center.x},
                    {"center_y_nm", spec.center.y},
                    {"angle_deg", spec.angle_deg},
                    {"length_nm", spec.length_nm},
                    {"density_per_um", spec.density_per_um}};
    return scene;
}

Scene make_two_circles(const TwoCirclesSpec& spec, std::uint64_t seed, CountMode mode) {
    require_positive(spec.diameter_nm, "circle diameter");
    require_positive(spec.density_per_um, "circle density");
    if (spec.edge_gap_nm < 0.0) throw Error("edge gap must be non-negative");
    auto rng = substream(seed, kGeometry, 0);
    Scene scene;
    scene.kind = SceneKind::two_circles;
    const double r = 0.5 * spec.diameter_nm;
    const double offset = r + 0.5 * spec.edge_gap_nm;
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (double cx : {spec.midpoint.x - offset, spec.midpoint.x + offset}) {
        const std::size_t n = draw_count(spec.density_per_um * kPi * spec.diameter_nm / 1000.0, mode, rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = angle(rng);
            scene.emitters.push_back({cx + r * std::cos(a), spec.midpoint.y + r * std::sin(a), 0.0});
        }
    }
    scene.params = {{"left_x_nm", spec.midpoint.x - offset},
                    {"right_x_nm", spec.midpoint.x + offset},
                    {"center_y_nm", spec.midpoint.y},
                    {"diameter_nm", spec.diameter_nm},
                    {"edge_gap_nm", spec.edge_gap_nm},
                    {"density_per_um", spec.density_per_um}};
    return scene;
}

Scene make_vesicles(const VesiclesSpec& spec, std::uint64_t seed, CountMode mode) {
    require_positive(spec.density_per_um2, "surface density");
    if (spec.spheres.empty()) throw Error("no vesicles given");
    auto rng = substream(seed, kGeometry, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    Scene scene;
    scene.kind = SceneKind::vesicles;
    for (std::size_t k = 0; k < spec.spheres.size(); ++k) {
        const Sphere& s = spec.spheres[k];
        require_positive(s.diameter_nm, "vesicle diameter");
        const double area_um2 = kPi * s.diameter_nm * s.diameter_nm / 1e6;
        const std::size_t n = draw_count(spec.density_per_um2 * area_um2, mode, rng);
        const double r = 0.5 * s.diameter_nm;
        for (std::size_t i = 0; i < n; ++i) {
            const Emitter d = normalized({normal(rng), normal(rng), normal(rng)});
            scene.emitters.push_back({s.x + r * d.x, s.y + r * d.y, s.z + r * d.z});
        }
        const std::string key = "vesicle" + std::to_string(k) + "_";
        scene.params[key + "x_nm"] = s.x;
        scene.params[key + "y_nm"] = s.y;
        scene.params[key + "z_nm"] = s.z;
        scene.params[key + "diameter_nm"] = s.diameter_nm;
    }
    scene.params["count"] = static_cast<double>(spec.spheres.size());
    scene.params["density_per_um2"] = spec.density_per_um2;
    return scene;
}

Scene make_tubes(const TubesSpec& spec, SceneKind kind, std::uint64_t seed, CountMode mode) {
    require_positive(spec.diameter_nm, "tube diameter");
    if (spec.axes.empty()) throw Error("no tube axes given");
    if (!(spec.linear_density_per_um > 0.0) && !(spec.surface_density_per_um2 > 0.0))
        throw Error("tube density must be positive");
    auto rng = substream(seed, kGeometry, 0);
    Scene scene;
    scene.kind = kind;
    for (std::size_t k = 0; k < spec.axes.size(); ++k) {
        const Segment3& a = spec.axes[k];
        const double len = std::hypot(a.to.x - a.from.x, a.to.y - a.from.y, a.to.z - a.from.z);
        const double expected = spec.linear_density_per_um > 0.0
                                    ? spec.linear_density_per_um * len / 1000.0
                                    : spec.surface_density_per_um2 * kPi * spec.diameter_nm * len / 1e6;
        add_tube(a, 0.5 * spec.diameter_nm, draw_count(expected, mode, rng), rng, scene.emitters);
        const std::string key = "tube" + std::to_string(k) + "_";
        scene.params[key + "z_from_nm"] = a.from.z;
        scene.params[key + "z_to_nm"] = a.to.z;
    }
    if (spec.debris_density_per_um3 > 0.0) {
        const Emitter& lo = spec.debris_box_min;
        const Emitter& hi = spec.debris_box_max;
        const double volume_um3 = (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z) / 1e9;
        const std::size_t n = draw_count(spec.debris_density_per_um3 * volume_um3, mode, rng);
        std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y), uz(lo.z, hi.z);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = ux(rng);
            const double y = uy(rng);
            scene.emitters.push_back({x, y, uz(rng)});
        }
        scene.params["debris_count"] = static_cast<double>(n);
    }
    scene.params["tube_count"] = static_cast<double>(spec.axes.size());
    scene.params["diameter_nm"] = spec.diameter_nm;
    return scene;
}

int default_field_size(SceneKind kind) {
    switch (kind) {
        case SceneKind::two_circles: return 32;
        case SceneKind::vesicles: return 48;
        default: return 64;
    }
}

Scene make_scene(SceneKind kind, const FieldOfView& fov, std::uint64_t seed, CountMode mode) {
    const Point2 c{0.5 * fov.width * fov.pixel_size_nm, 0.5 * fov.height * fov.pixel_size_nm};
    switch (kind) {
        case SceneKind::lines_crossing: {
            LinesCrossingSpec spec;
            spec.center = c;
            return make_lines_crossing(spec, seed, mode);
        }
        case SceneKind::two_circles: {
            TwoCirclesSpec spec;
            spec.midpoint = c;
            return make_two_circles(spec, seed, mode);
        }
        case SceneKind::vesicles: {
            VesiclesSpec spec;
            const double d = 650.0;
            spec.spheres = {{c.x - d, c.y - d, 0.0, 150.0},
                            {c.x + d, c.y - d, 0.0, 200.0},
                            {c.x - d, c.y + d, 0.0, 250.0},
                            {c.x + d, c.y + d, 0.0, 300.0}};
            return make_vesicles(spec, seed, mode);
        }
        case SceneKind::microtubules_debris: {
            // Inverted triangle; the two tubes meeting at the top-right corner are
            // 500 nm apart axially there, the other corners lie in focus.
            const Emitter tl{c.x - 1400.0, c.y - 900.0, 0.0};
            const Emitter tr{c.x + 1400.0, c.y - 900.0, 0.0};
            const Emitter bt{c.x, c.y + 1500.0, 0.0};
            auto extended = [](Emitter a, Emitter b, double za, double zb, double extra) {
                a.z = za;
                b.z = zb;
                const double len = std::hypot(b.x - a.x, b.y - a.y, b.z - a.z);
                const double f = extra / len;
                const Emitter d{b.x - a.x, b.y - a.y, b.z - a.z};
                return Segment3{{a.x - f * d.x, a.y - f * d.y, a.z - f * d.z}, {b.x + f * d.x, b.y + f * d.y, b.z + f * d.z}};
            };
            TubesSpec spec;
            spec.diameter_nm = 30.0;
            spec.linear_density_per_um = 800.0;
            spec.axes = {extended(tl, tr, 0.0, 250.0, 400.0), extended(tr, bt, -250.0, 0.0, 400.0),
                         extended(tl, bt, 0.0, 0.0, 400.0)};
            spec.debris_density_per_um3 = 1000.0;
            spec.debris_box_min = {0.0, 0.0, -500.0};
            spec.debris_box_max = {fov.width * fov.pixel_size_nm, fov.height * fov.pixel_size_nm, 500.0};
            return make_tubes(spec, SceneKind::microtubules_debris, seed, mode);
        }
        case SceneKind::mitochondria: {
            TubesSpec spec;
            spec.diameter_nm = 300.0;
            spec.surface_density_per_um2 = 3000.0;
            spec.axes = {{{c.x - 1200.0, c.y - 1600.0, 0.0}, {c.x - 1200.0, c.y + 1600.0, 0.0}},
                         {{c.x - 2000.0, c.y - 700.0, 300.0}, {c.x + 2000.0, c.y - 700.0, 300.0}},
                         {{c.x - 600.0, c.y + 2000.0, -300.0}, {c.x + 2000.0, c.y - 400.0, -300.0}}};
            return make_tubes(spec, SceneKind::mitochondria, seed, mode);
        }
        case SceneKind::custom: break;
    }
    throw Error("no built-in layout for scene '" + to_string(kind) + "'");
}

void Photokinetics::validate() const {
    require_positive(tau_on_ms, "tau_on");
    require_positive(tau_off_ms, "tau_off");
    require_positive(photon_rate_per_ms, "photon rate");
}

Photokinetics Photokinetics::from_duty_cycle(double duty, double tau_on_ms, double photon_rate_per_ms) {
    if (!(duty > 0.0 && duty < 1.0)) throw Error("duty cycle must be in (0, 1)");
    Photokinetics pk{tau_on_ms, tau_on_ms * (1.0 - duty) / duty, photon_rate_per_ms};
    pk.validate();
    return pk;
}

namespace {

/// Walks the on/off chain, calling on_interval(start, end) for every on-period clipped to [0, duration).
template <typename F>
void walk_trajectory(const Photokinetics& pk, double duration_ms, std::mt19937_64& rng, F&& on_interval) {
    std::exponential_distribution<double> on_dwell(1.0 / pk.tau_on_ms);
    std::exponential_distribution<double> off_dwell(1.0 / pk.tau_off_ms);
    bool on = std::bernoulli_distribution(pk.duty_cycle())(rng);
    double t = 0.0;
    while (t < duration_ms) {
        const double dwell = on ? on_dwell(rng) : off_dwell(rng);
        const double end = t + dwell;
        if (on) on_interval(t, std::min(end, duration_ms), end <= duration_ms);
        t = end;
        on = !on;
    }
}

}  // namespace

std::vector<double> simulate_on_times(const Photokinetics& pk, int frames, double exposure_ms, std::mt19937_64& rng) {
    pk.validate();
    std::vector<double> on(static_cast<std::size_t>(frames), 0.0);
    walk_trajectory(pk, frames * exposure_ms, rng, [&](double a, double b, bool) {
        auto f = static_cast<int>(a / exposure_ms);
        while (a < b && f < frames) {
            const double frame_end = (f + 1) * exposure_ms;
            const double seg_end = std::min(b, frame_end);
            on[static_cast<std::size_t>(f)] += seg_end - a;
            a = seg_end;
            ++f;
        }
    });
    return on;
}

std::vector<double> simulate_on_dwell_times(const Photokinetics& pk, double duration_ms, std::mt19937_64& rng) {
    pk.validate();
    std::vector<double> dwell;
    bool first = true;
    walk_trajectory(pk, duration_ms, rng, [&](double a, double b, bool complete) {
        // the initial on-period started before t = 0 and is censored; so is the last one
        if (complete && !(first && a == 0.0)) dwell.push_back(b - a);
        first = false;
    });
    return dwell;
}

std::vector<double> simulate_photokinetics(const Photokinetics& pk, int frames, double exposure_ms, std::uint64_t seed,
                                           bool poisson_emission) {
    auto rng = substream(seed, kEmission, 0);
    std::vector<double> s = simulate_on_times(pk, frames, exposure_ms, rng);
    for (double& v : s) {
        const double mean = pk.photon_rate_per_ms * v;
        v = poisson_emission && mean > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(mean)(rng)) : mean;
    }
    return s;
}

void DetectorSpec::validate() const {
    if (height <= 0 || width <= 0) throw Error("detector size must be positive");
    if (frames < 2) throw Error("fewer than 2 frames");
    require_positive(pixel_size_nm, "pixel size");
    require_positive(exposure_ms, "exposure");
    if (!(background_rate >= 0.0)) throw Error("background rate must be non-negative");
    if (!(read_noise_sd >= 0.0)) throw Error("read noise must be non-negative");
}

Image expected_signal_image(const Scene& scene, const Photokinetics& pk, const DetectorSpec& det, const PsfModel& psf) {
    pk.validate();
    psf.validate();
    Image img(det.height, det.width);
    const double photons = pk.duty_cycle() * pk.photon_rate_per_ms * det.exposure_ms;
    for (const Emitter& e : scene.emitters) splat(psf, e, photons, det, img.data.data());
    return img;
}

double background_for_sbr(const Scene& scene, const Photokinetics& pk, const DetectorSpec& det, const PsfModel& psf,
                          double sbr) {
    if (!(sbr > 1.0)) throw Error("SBR must be greater than 1");
    const Image signal = expected_signal_image(scene, pk, det, psf);
    const double peak = *std::max_element(signal.data.begin(), signal.data.end());
    if (!(peak > 0.0)) throw Error("scene produces no signal inside the field of view");
    return peak / (sbr - 1.0);
}

ImageStack render_stack(const Scene& scene, const Photokinetics& pk, const DetectorSpec& det, const PsfModel& psf,
                        std::uint64_t seed, const RenderOptions& options) {
    return render_stack(scene, std::vector<Photokinetics>(scene.emitters.size(), pk), det, psf, seed, options);
}

ImageStack render_stack(const Scene& scene, const std::vector<Photokinetics>& pk, const DetectorSpec& det,
                        const PsfModel& psf, std::uint64_t seed, const RenderOptions& options) {
    det.validate();
    psf.validate();
    if (pk.size() != scene.emitters.size()) throw Error("one photokinetics entry per emitter required");
    for (const auto& p : pk) p.validate();

    // Photon counts per emitter, sparse over frames.
    const std::size_t n = scene.emitters.size();
    std::vector<std::vector<std::pair<int, double>>> per_emitter(n);
    parallel_for(n, options.threads, [&](std::size_t k) {
        auto rng = substream(seed, kEmission, k);
        const auto on = simulate_on_times(pk[k], det.frames, det.exposure_ms, rng);
        for (int t = 0; t < det.frames; ++t) {
            const double mean = pk[k].photon_rate_per_ms * on[static_cast<std::size_t>(t)];
            if (!(mean > 0.0)) continue;
            const double photons = options.emission_noise
                                       ? static_cast<double>(std::poisson_distribution<long long>(mean)(rng))
                                       : mean;
            if (photons > 0.0) per_emitter[k].emplace_back(t, photons);
        }
    });
    std::vector<std::vector<std::pair<std::uint32_t, double>>> per_frame(static_cast<std::size_t>(det.frames));
    for (std::size_t k = 0; k < n; ++k)
        for (const auto& [t, photons] : per_emitter[k])
            per_frame[static_cast<std::size_t>(t)].emplace_back(static_cast<std::uint32_t>(k), photons);
    per_emitter.clear();

    const std::size_t pixels = static_cast<std::size_t>(det.height) * det.width;
    std::vector<double> samples(pixels * det.frames);
    parallel_for(static_cast<std::size_t>(det.frames), options.threads, [&](std::size_t t) {
        double* frame = samples.data() + t * pixels;
        std::fill(frame, frame + pixels, det.background_rate);
        for (const auto& [k, photons] : per_frame[t]) splat(psf, scene.emitters[k], photons, det, frame);
        if (!options.shot_noise && det.read_noise_sd == 0.0) return;
        auto rng = substream(seed, kDetector, t);
        std::normal_distribution<double> read(0.0, det.read_noise_sd);
        for (std::size_t p = 0; p < pixels; ++p) {
            double v = frame[p];
            if (options.shot_noise)
                v = v > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(v)(rng)) : 0.0;
            if (det.read_noise_sd > 0.0) v = std::max(0.0, v + read(rng));
            frame[p] = v;
        }
    });

    Calibration cal;
    cal.pixel_size_nm = det.pixel_size_nm;
    cal.wavelength_nm = psf.wavelength_nm;
    cal.numerical_aperture = psf.numerical_aperture;
    cal.exposure_ms = det.exposure_ms;
    return ImageStack(det.frames, det.height, det.width, std::move(samples), cal);
}

Simulation simulate(const SimulationRequest& req) {
    const int size = req.size > 0 ? req.size : default_field_size(req.kind);
    const FieldOfView fov{size, size, req.pixel_size_nm};
    Scene scene = make_scene(req.kind, fov, req.seed, req.count_mode);
    const Photokinetics pk = Photokinetics::from_duty_cycle(req.duty, req.tau_on_ms, req.photon_rate_per_ms);
    DetectorSpec det;
    det.height = size;
    det.width = size;
    det.pixel_size_nm = req.pixel_size_nm;
    det.exposure_ms = req.exposure_ms;
    det.frames = req.frames;
    det.read_noise_sd = req.read_noise_sd;
    det.background_rate = background_for_sbr(scene, pk, det, req.psf, req.sbr);
    RenderOptions opts;
    opts.threads = req.threads;
    ImageStack stack = render_stack(scene, pk, det, req.psf, req.seed, opts);
    return Simulation{std::move(scene), pk, det, std::move(stack)};
}

void write_ground_truth_csv(const std::filesystem::path& path, const Scene& scene) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "x_nm,y_nm,z_nm\n";
    for (const Emitter& e : scene.emitters) os << e.x << ',' << e.y << ',' << e.z << '\n';
}

std::vector<Emitter> read_ground_truth_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("missing file: " + path.string());
    std::string line;
    if (!std::getline(is, line) || line.rfind("x_nm,y_nm,z_nm", 0) != 0)
        throw Error("ground-truth CSV must start with header x_nm,y_nm,z_nm");
    std::vector<Emitter> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Emitter e;
        char c1 = 0, c2 = 0;
        if (!(ls >> e.x >> c1 >> e.y >> c2 >> e.z) || c1 != ',' || c2 != ',')
            throw Error("malformed ground-truth row: " + line);
        out.push_back(e);
    }
    return out;
}

}  // namespace musical
