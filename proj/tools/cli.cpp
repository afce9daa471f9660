#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "musical/metrics.hpp"
#include "musical/reconstruct.hpp"
#include "musical/simulate.hpp"
#include "musical/stack_io.hpp"

namespace musical::cli {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
    double pixel_size_nm = 80.0;
    double wavelength_nm = 665.0;
    double na = 1.42;
    std::string psf_kind = "gaussian";
    double defocus_scale = 0.4;
    int threads = 0;

    Calibration calibration() const {
        Calibration c;
        c.pixel_size_nm = pixel_size_nm;
        c.wavelength_nm = wavelength_nm;
        c.numerical_aperture = na;
        return c;
    }
    PsfModel psf() const {
        PsfModel p;
        if (psf_kind == "gaussian")
            p.kind = PsfKind::gaussian;
        else if (psf_kind == "airy")
            p.kind = PsfKind::airy;
        else
            throw Error("unknown psf kind '" + psf_kind + "' (expected gaussian or airy)");
        p.wavelength_nm = wavelength_nm;
        p.numerical_aperture = na;
        p.defocus_scale = defocus_scale;
        p.validate();
        return p;
    }
    void echo(RunManifest& m) const {
        m.set_config("pixel_size_nm", pixel_size_nm);
        m.set_config("wavelength_nm", wavelength_nm);
        m.set_config("na", na);
        m.set_config("psf.kind", psf_kind);
        m.set_config("psf.defocus_scale", defocus_scale);
        m.set_config("threads", threads);
    }
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--pixel-size-nm", o.pixel_size_nm, "Camera pixel size in the sample plane (nm)")
        ->capture_default_str();
    cmd->add_option("--wavelength-nm", o.wavelength_nm, "Emission wavelength (nm)")->capture_default_str();
    cmd->add_option("--na", o.na, "Numerical aperture")->capture_default_str();
    cmd->add_option("--psf-kind", o.psf_kind, "gaussian or airy")->capture_default_str();
    cmd->add_option("--psf-defocus-scale", o.defocus_scale, "Gaussian blur growth per unit defocus")
        ->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

struct VariantOptions {
    std::string method = "musical";
    std::string threshold = "B";
    int window_size = 0;
    std::string window_filter;

    std::optional<double> min_mean() const {
        if (window_filter.empty()) return std::nullopt;
        const std::string prefix = "minmean=";
        if (window_filter.rfind(prefix, 0) != 0)
            throw Error("--threshold-window-filter expects minmean=<value>");
        try {
            return std::stod(window_filter.substr(prefix.size()));
        } catch (const std::exception&) {
            throw Error("--threshold-window-filter expects minmean=<value>");
        }
    }
};

void add_variant(CLI::App* cmd, VariantOptions& v) {
    cmd->add_option("--method", v.method, "musical or ev")->capture_default_str();
    cmd->add_option("--threshold", v.threshold, "A, B, soft, or a log10(sigma0) value")->capture_default_str();
    cmd->add_option("--window-size", v.window_size, "Odd window side in pixels (0 = derived from the PSF)")
        ->capture_default_str();
    cmd->add_option("--threshold-window-filter", v.window_filter,
                    "minmean=<v>: ignore windows with mean intensity below v in threshold statistics");
}

std::string lower_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os << text;
}

nlohmann::json params_json(const Scene& scene) {
    nlohmann::json j;
    j["scene"] = to_string(scene.kind);
    j["params"] = scene.params;
    j["emitters"] = scene.emitters.size();
    return j;
}

fs::path geometry_sidecar(const fs::path& ground_truth) { return ground_truth.string() + ".geometry.json"; }

// --- simulate -------------------------------------------------------------

struct SimulateOptions {
    std::string scene = "lines";
    double duty = 0.05;
    double sbr = 4.0;
    int frames = 500;
    double exposure_ms = 10.0;
    std::uint64_t seed = 1;
    std::string out;
    std::string ground_truth;
    int size = 0;
    double tau_on_ms = 10.0;
    double photon_rate = 100.0;
    double read_noise_sd = 0.0;
    bool poisson_count = false;
};

int do_simulate(const SimulateOptions& o, const CommonOptions& common, RunManifest& m, std::ostream& out) {
    SimulationRequest req;
    req.kind = parse_scene_kind(o.scene);
    req.size = o.size;
    req.pixel_size_nm = common.pixel_size_nm;
    req.duty = o.duty;
    req.sbr = o.sbr;
    req.frames = o.frames;
    req.exposure_ms = o.exposure_ms;
    req.tau_on_ms = o.tau_on_ms;
    req.photon_rate_per_ms = o.photon_rate;
    req.read_noise_sd = o.read_noise_sd;
    req.count_mode = o.poisson_count ? CountMode::poisson : CountMode::deterministic;
    req.psf = common.psf();
    req.seed = o.seed;
    req.threads = common.threads;

    common.echo(m);
    m.set_seed(o.seed);
    m.set_config("scene", to_string(req.kind));
    m.set_config("duty", o.duty);
    m.set_config("sbr", o.sbr);
    m.set_config("frames", o.frames);
    m.set_config("exposure_ms", o.exposure_ms);
    m.set_config("tau_on_ms", o.tau_on_ms);
    m.set_config("photon_rate_per_ms", o.photon_rate);
    m.set_config("read_noise_sd", o.read_noise_sd);
    m.set_config("count_mode", o.poisson_count ? "poisson" : "deterministic");

    const Simulation sim = m.timed("simulate", [&] { return simulate(req); });
    m.set_config("size", sim.detector.width);
    m.set_config("background_rate", sim.detector.background_rate);
    m.set_config("tau_off_ms", sim.photokinetics.tau_off_ms);
    m.set_config("ground_truth", params_json(sim.scene));

    m.timed("write", [&] {
        write_stack(o.out, sim.stack, smallest_exact_format(sim.stack));
        m.add_output(o.out);
        if (!o.ground_truth.empty()) {
            write_ground_truth_csv(o.ground_truth, sim.scene);
            write_text(geometry_sidecar(o.ground_truth), params_json(sim.scene).dump(2) + "\n");
            m.add_output(o.ground_truth);
        }
    });
    m.write_alongside_outputs();
    out << "simulated " << sim.scene.emitters.size() << " emitters, " << sim.stack.frames() << " frames of "
        << sim.stack.height() << "x" << sim.stack.width() << ", background " << sim.detector.background_rate
        << " photons/pixel/frame\n";
    return 0;
}

// --- reconstruct / cardinality / svplot -----------------------------------

ReconstructionConfig make_config(const VariantOptions& v, const CommonOptions& common, double alpha, int subpixels,
                                 double epsilon) {
    ReconstructionConfig cfg;
    cfg.window_side = v.window_size;
    cfg.subpixels_per_pixel = subpixels;
    cfg.indicator.alpha = alpha;
    cfg.indicator.epsilon_floor = epsilon;
    cfg.variant = parse_variant(v.method, v.threshold);
    cfg.psf = common.psf();
    cfg.threshold_min_mean = v.min_mean();
    cfg.threads = common.threads;
    cfg.validate();
    return cfg;
}

void echo_config(RunManifest& m, const ReconstructionConfig& cfg, const VariantOptions& v) {
    m.set_config("method", v.method);
    m.set_config("threshold", v.threshold);
    m.set_config("variant", cfg.variant.name());
    m.set_config("alpha", cfg.indicator.alpha);
    m.set_config("epsilon_floor", cfg.indicator.epsilon_floor);
    m.set_config("subpixels", cfg.subpixels_per_pixel);
    if (cfg.threshold_min_mean) m.set_config("threshold_min_mean", *cfg.threshold_min_mean);
}

void echo_threshold(RunManifest& m, const ThresholdSpec& t) {
    m.set_config("scheme", to_string(t.scheme));
    if (is_soft(t.scheme)) {
        m.set_config("sigma_min", t.sigma_min);
        m.set_config("sigma_max", t.sigma_max);
    } else {
        m.set_config("sigma0", t.sigma0);
    }
}

struct ReconstructOptions {
    std::string input;
    std::string output;
    double alpha = 4.0;
    int subpixels = 10;
    double epsilon = 1e-12;
    std::string export_sv;
    std::string export_cardinality;
    bool log_display = false;
    bool raw_float = false;
};

void write_reconstruction(const fs::path& path, const Reconstruction& recon, bool raw_float, bool log_display) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") {
        write_png(path, display_image(recon, 255.0, log_display));
    } else if (ext == ".tif" || ext == ".tiff") {
        if (raw_float)
            write_tiff(path, recon.image, SampleFormat::float32);
        else
            write_tiff(path, display_image(recon, 65535.0, log_display), SampleFormat::uint16);
    } else {
        throw Error("output must be .tif, .tiff or .png: " + path.string());
    }
}

int do_reconstruct(const ReconstructOptions& o, const VariantOptions& v, const CommonOptions& common, RunManifest& m,
                   std::ostream& out) {
    const ReconstructionConfig cfg = make_config(v, common, o.alpha, o.subpixels, o.epsilon);
    common.echo(m);
    echo_config(m, cfg, v);
    m.set_config("log_display", o.log_display);
    m.set_config("float", o.raw_float);
    m.add_input(o.input);
    const ImageStack stack = m.timed("load", [&] { return load_stack(o.input, common.calibration()); });
    const int side = cfg.resolved_window_side(common.pixel_size_nm);
    m.set_config("window_size", side);

    if (cfg.variant.mode == ThresholdMode::soft && !o.export_cardinality.empty())
        throw Error("cardinality undefined for soft thresholding");

    const WindowAnalysis analysis = m.timed("decompose", [&] { return WindowAnalysis(stack, side, cfg.threads); });
    const Reconstruction recon = m.timed("indicator", [&] { return reconstruct(analysis, cfg); });
    echo_threshold(m, recon.threshold);

    m.timed("write", [&] {
        write_reconstruction(o.output, recon, o.raw_float, o.log_display);
        m.add_output(o.output);
        if (!o.export_sv.empty()) {
            write_text(o.export_sv, singular_values_csv(export_singular_values(analysis)));
            m.add_output(o.export_sv);
        }
        if (!o.export_cardinality.empty()) {
            write_png(o.export_cardinality, cardinality_display(cardinality_map(analysis, recon.threshold.sigma0)));
            m.add_output(o.export_cardinality);
        }
    });
    m.write_alongside_outputs();
    out << cfg.variant.name() << ": " << recon.image.rows << "x" << recon.image.cols << " image from "
        << analysis.window_count() << " windows of side " << side << "\n";
    return 0;
}

struct CardinalityOptions {
    std::string input;
    std::string output;
};

int do_cardinality(const CardinalityOptions& o, const VariantOptions& v, const CommonOptions& common, RunManifest& m,
                   std::ostream& out) {
    const ReconstructionConfig cfg = make_config(v, common, 4.0, 1, 1e-12);
    if (cfg.variant.mode == ThresholdMode::soft) throw Error("cardinality undefined for soft thresholding");
    common.echo(m);
    echo_config(m, cfg, v);
    m.add_input(o.input);
    const ImageStack stack = m.timed("load", [&] { return load_stack(o.input, common.calibration()); });
    const int side = cfg.resolved_window_side(common.pixel_size_nm);
    m.set_config("window_size", side);
    const WindowAnalysis analysis = m.timed("decompose", [&] { return WindowAnalysis(stack, side, cfg.threads); });
    const ThresholdSpec t = resolve_threshold(analysis, cfg.variant, cfg.threshold_min_mean);
    echo_threshold(m, t);
    const CardinalityMap map = cardinality_map(analysis, t.sigma0);
    m.timed("write", [&] {
        write_png(o.output, cardinality_display(map));
        m.add_output(o.output);
    });
    m.write_alongside_outputs();
    out << "cardinality map written, sigma0 = " << t.sigma0 << ", M = " << map.max_order << "\n";
    return 0;
}

struct SvplotOptions {
    std::string input;
    std::string output;
    int window_size = 0;
};

int do_svplot(const SvplotOptions& o, const CommonOptions& common, RunManifest& m, std::ostream& out) {
    common.echo(m);
    m.add_input(o.input);
    const ImageStack stack = m.timed("load", [&] { return load_stack(o.input, common.calibration()); });
    ReconstructionConfig cfg;
    cfg.window_side = o.window_size;
    cfg.psf = common.psf();
    cfg.threads = common.threads;
    cfg.validate();
    const int side = cfg.resolved_window_side(common.pixel_size_nm);
    m.set_config("window_size", side);
    const WindowAnalysis analysis = m.timed("decompose", [&] { return WindowAnalysis(stack, side, cfg.threads); });
    const auto rows = export_singular_values(analysis);
    m.timed("write", [&] {
        write_text(o.output, singular_values_csv(rows));
        m.add_output(o.output);
    });
    m.write_alongside_outputs();
    out << rows.size() << " singular values from " << analysis.window_count() << " windows\n";
    return 0;
}

// --- evaluate -------------------------------------------------------------

struct EvaluateOptions {
    std::string recon;
    std::string ground_truth;
    std::string geometry;
    std::string target = "lines";
    std::string output;
    int subpixels = 10;
    double band_half_width = 0.4;
};

std::string csv_number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

int do_evaluate(const EvaluateOptions& o, const CommonOptions& common, RunManifest& m, std::ostream& out) {
    common.echo(m);
    m.set_config("target", o.target);
    m.set_config("subpixels", o.subpixels);
    m.set_config("band_half_width", o.band_half_width);
    m.add_input(o.recon);
    m.add_input(o.ground_truth);

    const fs::path geometry_path = o.geometry.empty() ? geometry_sidecar(o.ground_truth) : fs::path(o.geometry);
    m.add_input(geometry_path);
    std::ifstream gs(geometry_path);
    if (!gs) throw Error("missing file: " + geometry_path.string());
    const nlohmann::json geometry = nlohmann::json::parse(gs);
    const auto params = geometry.at("params").get<std::map<std::string, double>>();
    // ground truth is read to validate the file even though the geometry carries the parameters
    const auto emitters = read_ground_truth_csv(o.ground_truth);

    Image fine = read_tiff_page(o.recon);
    const Reconstruction recon = wrap_fine_image(std::move(fine), o.subpixels, common.pixel_size_nm);
    MetricSettings settings;
    settings.band_half_width = o.band_half_width;

    std::ostringstream csv;
    csv << "x_nm,separation_nm,v,p1,p2,r\n";
    auto row = [&](const RatioPoint& p) {
        csv << csv_number(p.x_nm) << ',' << csv_number(p.separation_nm) << ',' << csv_number(p.v) << ','
            << csv_number(p.p1) << ',' << csv_number(p.p2) << ',' << csv_number(p.r) << '\n';
    };

    if (o.target == "lines") {
        const auto geom = CrossingLinesGeometry::from_params(params);
        for (const auto& p : ratio_curve(recon, geom, settings))
            if (p) row(*p);
        const auto res = resolution(recon, geom, settings);
        if (res.separation_nm) {
            out << "resolution_nm " << *res.separation_nm << " (x = " << res.x_nm << " nm)\n";
            m.set_config("resolution_nm", *res.separation_nm);
        } else {
            out << "resolution_nm unresolved\n";
            m.set_config("resolution_nm", "unresolved");
        }
    } else if (o.target == "circles") {
        const auto geom = TwoCirclesGeometry::from_params(params);
        const auto p = circles_ratio(recon, geom, settings);
        if (!p) throw Error("contrast: peaks not found");
        row(*p);
        out << "contrast " << 1.0 - p->r << "\n";
        m.set_config("contrast", 1.0 - p->r);
    } else {
        throw Error("unknown target '" + o.target + "' (expected lines or circles)");
    }
    m.set_config("emitters", emitters.size());
    write_text(o.output, csv.str());
    m.add_output(o.output);
    m.write_alongside_outputs();
    return 0;
}

std::string flag_for_key(std::string key) {
    std::replace(key.begin(), key.end(), '.', '-');
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> config_flags(const std::string& path, const std::vector<std::string>& args) {
    std::ifstream is(path);
    if (!is) throw Error("missing file: " + path);
    auto present = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    std::vector<std::string> flags;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        const std::string flag = flag_for_key(key);
        if (present(flag)) continue;
        if (value == "true") {
            flags.push_back(flag);
        } else if (value != "false") {
            flags.push_back(flag);
            flags.push_back(value);
        }
    }
    return flags;
}

int run(const std::vector<std::string>& input_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fluctuation-based super-resolution reconstruction (MUSICAL and soft/EV indicator families)",
                 "musical"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config_path;
    CommonOptions common;
    VariantOptions variant;

    SimulateOptions sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Render a synthetic blinking-emitter image stack");
    simulate_cmd->add_option("--scene", sim.scene, "lines, circles, vesicles, microtubules or mitochondria")
        ->capture_default_str();
    simulate_cmd->add_option("--duty", sim.duty, "Duty cycle tau_on / (tau_on + tau_off)")->capture_default_str();
    simulate_cmd->add_option("--sbr", sim.sbr, "Signal-to-background ratio")->capture_default_str();
    simulate_cmd->add_option("--frames", sim.frames)->capture_default_str();
    simulate_cmd->add_option("--exposure-ms", sim.exposure_ms)->capture_default_str();
    simulate_cmd->add_option("--seed", sim.seed)->capture_default_str();
    simulate_cmd->add_option("--out", sim.out, "Output multi-page TIFF")->required();
    simulate_cmd->add_option("--ground-truth", sim.ground_truth, "Emitter CSV (x_nm,y_nm,z_nm)");
    simulate_cmd->add_option("--size", sim.size, "Image side in pixels (0 = scene default)")->capture_default_str();
    simulate_cmd->add_option("--tau-on-ms", sim.tau_on_ms)->capture_default_str();
    simulate_cmd->add_option("--photon-rate", sim.photon_rate, "Photons per ms while on")->capture_default_str();
    simulate_cmd->add_option("--read-noise-sd", sim.read_noise_sd)->capture_default_str();
    simulate_cmd->add_flag("--poisson-count", sim.poisson_count, "Draw emitter counts from a Poisson law");
    add_common(simulate_cmd, common);

    ReconstructOptions rec;
    auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Super-resolve an image stack");
    reconstruct_cmd->add_option("--input", rec.input)->required()->check(CLI::ExistingFile);
    reconstruct_cmd->add_option("--output,--out", rec.output, ".tif (16-bit, or float with --float) or .png")
        ->required();
    reconstruct_cmd->add_option("--alpha", rec.alpha)->capture_default_str();
    reconstruct_cmd->add_option("--subpixels", rec.subpixels)->capture_default_str();
    reconstruct_cmd->add_option("--epsilon-floor", rec.epsilon)->capture_default_str();
    reconstruct_cmd->add_option("--export-sv", rec.export_sv, "Singular value table CSV");
    reconstruct_cmd->add_option("--export-cardinality", rec.export_cardinality, "Cardinality map PNG");
    reconstruct_cmd->add_flag("--log-display", rec.log_display, "log10(1 + 1e3 f / f_max) display mapping");
    reconstruct_cmd->add_flag("--float", rec.raw_float, "Write raw indicator values as 32-bit float TIFF");
    add_variant(reconstruct_cmd, variant);
    add_common(reconstruct_cmd, common);

    CardinalityOptions card;
    auto* cardinality_cmd = app.add_subcommand("cardinality", "Signal-subspace size per window (hard schemes)");
    cardinality_cmd->add_option("--input", card.input)->required()->check(CLI::ExistingFile);
    cardinality_cmd->add_option("--output,--out", card.output, "8-bit PNG")->required();
    add_variant(cardinality_cmd, variant);
    add_common(cardinality_cmd, common);

    SvplotOptions sv;
    auto* svplot_cmd = app.add_subcommand("svplot", "Per-window singular values as CSV");
    svplot_cmd->add_option("--input", sv.input)->required()->check(CLI::ExistingFile);
    svplot_cmd->add_option("--output,--out", sv.output, "CSV row,col,order,sigma,log10_sigma")->required();
    svplot_cmd->add_option("--window-size", sv.window_size)->capture_default_str();
    add_common(svplot_cmd, common);

    EvaluateOptions ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Resolution or contrast of a reconstruction");
    evaluate_cmd->add_option("--recon", ev.recon, "Reconstruction TIFF (preferably --float output)")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--ground-truth", ev.ground_truth)->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--geometry", ev.geometry, "Geometry JSON (default <ground-truth>.geometry.json)");
    evaluate_cmd->add_option("--target", ev.target, "lines or circles")->capture_default_str();
    evaluate_cmd->add_option("--out,--output", ev.output, "Ratio curve CSV")->required();
    evaluate_cmd->add_option("--subpixels", ev.subpixels)->capture_default_str();
    evaluate_cmd->add_option("--band-half-width", ev.band_half_width)->capture_default_str();
    add_common(evaluate_cmd, common);

    for (auto* cmd : {simulate_cmd, reconstruct_cmd, cardinality_cmd, svplot_cmd, evaluate_cmd})
        cmd->add_option("--config", config_path, "Flat key = value file; command-line flags take precedence");

    try {
        std::vector<std::string> args = input_args;
        const auto cfg_it = std::find(args.begin(), args.end(), "--config");
        if (cfg_it != args.end() && cfg_it + 1 != args.end()) {
            const auto extra = config_flags(*(cfg_it + 1), args);
            args.insert(args.end(), extra.begin(), extra.end());
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        RunManifest manifest(name, input_args);
        if (!config_path.empty()) manifest.set_config("config_file", config_path);
        if (*simulate_cmd) return do_simulate(sim, common, manifest, out);
        if (*reconstruct_cmd) return do_reconstruct(rec, variant, common, manifest, out);
        if (*cardinality_cmd) return do_cardinality(card, variant, common, manifest, out);
        if (*svplot_cmd) return do_svplot(sv, common, manifest, out);
        if (*evaluate_cmd) return do_evaluate(ev, common, manifest, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace musical::cli
