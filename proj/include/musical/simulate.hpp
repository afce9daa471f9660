#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "musical/image.hpp"
#include "musical/psf.hpp"

namespace musical {

/// Emitter position in nm. x runs along columns, y along rows, origin at the
/// top-left corner of the field of view; z = 0 is the focal plane.
struct Emitter {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

enum class SceneKind { lines_crossing, two_circles, vesicles, microtubules_debris, mitochondria, custom };

std::string to_string(SceneKind kind);
SceneKind parse_scene_kind(const std::string& name);

struct Scene {
    SceneKind kind = SceneKind::custom;
    std::vector<Emitter> emitters;
    std::map<std::string, double> params;  // ground-truth geometry (centers, angles, diameters ...)
};

enum class CountMode { deterministic, poisson };

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct LinesCrossingSpec {
    Point2 center;
    double angle_deg = 60.0;           // full angle between the lines; bisector along +x
    double length_nm = 4000.0;         // per line, centered on the crossing
    double density_per_um = 500.0;
};

struct TwoCirclesSpec {
    Point2 midpoint;                   // midway between the two centers; circles side by side along x
    double diameter_nm = 200.0;
    double edge_gap_nm = 150.0;
    double density_per_um = 500.0;     // along each perimeter
};

struct Sphere {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double diameter_nm = 0.0;
};

struct VesiclesSpec {
    std::vector<Sphere> spheres;
    double density_per_um2 = 800.0;
};

struct Segment3 {
    Emitter from;
    Emitter to;
};

/// Surface-labelled cylinders plus optional free emitters in a box.
struct TubesSpec {
    std::vector<Segment3> axes;
    double diameter_nm = 30.0;
    double linear_density_per_um = 0.0;   // emitters per um of tube length, if > 0
    double surface_density_per_um2 = 0.0; // otherwise emitters per um^2 of tube surface
    double debris_density_per_um3 = 0.0;
    Emitter debris_box_min;
    Emitter debris_box_max;
};

Scene make_lines_crossing(const LinesCrossingSpec& spec, std::uint64_t seed, CountMode mode = CountMode::deterministic);
Scene make_two_circles(const TwoCirclesSpec& spec, std::uint64_t seed, CountMode mode = CountMode::deterministic);
Scene make_vesicles(const VesiclesSpec& spec, std::uint64_t seed, CountMode mode = CountMode::deterministic);
Scene make_tubes(const TubesSpec& spec, SceneKind kind, std::uint64_t seed, CountMode mode = CountMode::deterministic);

/// Field of view used to lay out the built-in scenes.
struct FieldOfView {
    int height = 64;
    int width = 64;
    double pixel_size_nm = 80.0;
};

/// Default image size (pixels, square) for each built-in scene.
int default_field_size(SceneKind kind);

/// Built-in scenes centered in the field of view with their reference parameters:
/// 60 degree crossing lines, 200 nm circles with a 150 nm gap, vesicles of 150/200/250/300 nm,
/// microtubule triangle with debris, and three mitochondria at z = 0, +300, -300 nm.
Scene make_scene(SceneKind kind, const FieldOfView& fov, std::uint64_t seed, CountMode mode = CountMode::deterministic);

/// Two-state blinking: exponential on/off dwell times with means tau_on, tau_off.
struct Photokinetics {
    double tau_on_ms = 10.0;
    double tau_off_ms = 190.0;
    double photon_rate_per_ms = 100.0;

    double duty_cycle() const { return tau_on_ms / (tau_on_ms + tau_off_ms); }
    void validate() const;

    /// Keeps tau_on and sets tau_off so that tau_on / (tau_on + tau_off) = duty.
    static Photokinetics from_duty_cycle(double duty, double tau_on_ms = 10.0, double photon_rate_per_ms = 100.0);
};

/// On-state time (ms) of one emitter in each of `frames` consecutive exposures,
/// starting from the stationary distribution.
std::vector<double> simulate_on_times(const Photokinetics& pk, int frames, double exposure_ms, std::mt19937_64& rng);

/// Lengths of completed on-periods over a trajectory of the given duration (for statistics checks).
std::vector<double> simulate_on_dwell_times(const Photokinetics& pk, double duration_ms, std::mt19937_64& rng);

/// Per-frame photon counts s_n(t) = Poisson(photon_rate * on_time) (or the expectation when noiseless).
std::vector<double> simulate_photokinetics(const Photokinetics& pk, int frames, double exposure_ms, std::uint64_t seed,
                                           bool poisson_emission = true);

struct DetectorSpec {
    int height = 64;
    int width = 64;
    double pixel_size_nm = 80.0;
    double exposure_ms = 10.0;
    double background_rate = 0.0;  // photons / pixel / frame
    int frames = 500;
    double read_noise_sd = 0.0;

    void validate() const;
};

struct RenderOptions {
    bool shot_noise = true;
    bool emission_noise = true;
    int threads = 0;
};

/// Expected (temporal-mean) noise-free image of the emitters alone.
Image expected_signal_image(const Scene& scene, const Photokinetics& pk, const DetectorSpec& detector,
                            const PsfModel& psf);

/// Background rate giving SBR = (B + S_peak) / B, S_peak the peak of expected_signal_image.
double background_for_sbr(const Scene& scene, const Photokinetics& pk, const DetectorSpec& detector,
                          const PsfModel& psf, double sbr);

/// a(t) = sum_n g(r_n) s_n(t) + background, then Poisson shot noise. All emitters share `pk`.
ImageStack render_stack(const Scene& scene, const Photokinetics& pk, const DetectorSpec& detector, const PsfModel& psf,
                        std::uint64_t seed, const RenderOptions& options = {});

/// Per-emitter photokinetics; pk.size() must equal the emitter count.
ImageStack render_stack(const Scene& scene, const std::vector<Photokinetics>& pk, const DetectorSpec& detector,
                        const PsfModel& psf, std::uint64_t seed, const RenderOptions& options = {});

/// Full recipe used by the CLI and the evaluation harness.
struct SimulationRequest {
    SceneKind kind = SceneKind::lines_crossing;
    int size = 0;  // 0: default_field_size(kind)
    double pixel_size_nm = 80.0;
    double duty = 0.05;
    double sbr = 4.0;
    int frames = 500;
    double exposure_ms = 10.0;
    double tau_on_ms = 10.0;
    double photon_rate_per_ms = 100.0;
    double read_noise_sd = 0.0;
    CountMode count_mode = CountMode::deterministic;
    PsfModel psf;
    std::uint64_t seed = 1;
    int threads = 0;
};

struct Simulation {
    Scene scene;
    Photokinetics photokinetics;
    DetectorSpec detector;
    ImageStack stack;
};

Simulation simulate(const SimulationRequest& request);

void write_ground_truth_csv(const std::filesystem::path& path, const Scene& scene);
std::vector<Emitter> read_ground_truth_csv(const std::filesystem::path& path);

}  // namespace musical
