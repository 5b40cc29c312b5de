#include "hsiband/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "hsiband/composite.hpp"
#include "hsiband/error.hpp"
#include "hsiband/rng.hpp"

namespace hsiband {

namespace {
constexpr double kIrCutNm = 750.0;
}

void SensorModel::validate() const {
    axis.validate();
    if (response.rows() != 3 || response.cols() != static_cast<Eigen::Index>(
                                                       axis.wavelengths_nm.size()))
        throw Error("sensor model: response must be 3 x n_bands");
    for (int r = 0; r < 3; ++r) {
        double sum = 0.0;
        for (Eigen::Index c = 0; c < response.cols(); ++c) {
            if (response(r, c) < 0.0) throw Error("sensor model: negative sensitivity");
            sum += response(r, c);
        }
        if (sum <= 0.0) throw Error("sensor model: row with no response");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(response);
    if (svd.singularValues()(2) <= 1e-9 * svd.singularValues()(0))
        throw Error("sensor model: response rank < 3");
}

SensorModel build_sensor_model(const WavelengthAxis& axis) {
    axis.validate();
    if (axis.wavelengths_nm.front() > 450.0 || axis.wavelengths_nm.back() < 700.0)
        throw ValidationError("sensor model: axis must span at least 450-700 nm");

    const struct {
        double center, sigma;
    } rows[3] = {{600.0, 55.0}, {540.0, 50.0}, {460.0, 40.0}};

    SensorModel m;
    m.axis = axis;
    const auto n = static_cast<Eigen::Index>(axis.wavelengths_nm.size());
    m.response.resize(3, n);
    for (int r = 0; r < 3; ++r) {
        double sum = 0.0;
        for (Eigen::Index c = 0; c < n; ++c) {
            const double lambda = axis.wavelengths_nm[static_cast<size_t>(c)];
            double v = 0.0;
            if (lambda <= kIrCutNm) {
                const double d = (lambda - rows[r].center) / rows[r].sigma;
                v = std::exp(-0.5 * d * d);
            }
            m.response(r, c) = v;
            sum += v;
        }
        m.response.row(r) /= sum;
    }
    m.validate();
    return m;
}

MetamerPair make_metamer_pair(const SensorModel& sensor, const Eigen::VectorXd& base,
                              const NirBump& bump, double min_separation) {
    sensor.validate();
    const Eigen::Index n = sensor.response.cols();
    if (base.size() != n) throw ValidationError("metamer pair: base length != band count");
    for (Eigen::Index i = 0; i < n; ++i)
        if (base(i) < 0.0 || base(i) > 1.0)
            throw ValidationError("metamer pair: base reflectance outside [0,1]");
    if (bump.center < 0 || bump.center >= n)
        throw ValidationError("metamer pair: bump center out of range");
    if (bump.width <= 0.0) throw ValidationError("metamer pair: bump width must be > 0");
    if (bump.amplitude < 0.0) throw ValidationError("metamer pair: negative bump amplitude");

    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = static_cast<double>(i) - bump.center;
        if (std::abs(d) <= 3.0 * bump.width)
            delta(i) = bump.amplitude * std::exp(-d * d / (2.0 * bump.width * bump.width));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (delta(i) <= 0.0) continue;
        for (int r = 0; r < 3; ++r)
            if (sensor.response(r, i) != 0.0)
                throw ValidationError("metamer pair: bump overlaps nonzero sensor response at channel " +
                                      std::to_string(i));
        if (base(i) + delta(i) > 1.0)
            throw ValidationError("metamer pair: bump would require clipping at channel " +
                                  std::to_string(i));
    }

    MetamerPair pair;
    pair.spectrum_a = base;
    pair.spectrum_b = base + delta;

    const Eigen::Vector3d rgb_gap = sensor.response * (pair.spectrum_a - pair.spectrum_b);
    if (rgb_gap.lpNorm<Eigen::Infinity>() > 1e-9)
        throw Error("metamer pair: RGB projections differ — construction broken");
    double nir_sep = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (sensor.axis.wavelengths_nm[static_cast<size_t>(i)] > kIrCutNm)
            nir_sep = std::max(nir_sep, std::abs(pair.spectrum_a(i) - pair.spectrum_b(i)));
    if (nir_sep < min_separation)
        throw Error("metamer pair: NIR separation " + std::to_string(nir_sep) +
                    " below required " + std::to_string(min_separation));
    return pair;
}

void SceneSpec::validate() const {
    axis.validate();
    if (rows <= 0 || cols <= 0) throw ValidationError("scene spec: rows/cols must be positive");
    const auto n = static_cast<Eigen::Index>(axis.wavelengths_nm.size());
    if (background.size() != n)
        throw ValidationError("scene spec: background spectrum length != band count");
    if (noise_sigma < 0.0) throw ValidationError("scene spec: noise sigma must be >= 0");
    std::set<std::string> labels;
    for (const auto& p : patches) {
        if (p.label.empty() || p.class_name.empty())
            throw ValidationError("scene spec: patch label/class must be nonempty");
        if (p.label == "background")
            throw ValidationError("scene spec: label 'background' is reserved");
        if (!labels.insert(p.label).second)
            throw ValidationError("scene spec: duplicate patch label '" + p.label + "'");
        if (p.x < 0 || p.y < 0 || p.width <= 0 || p.height <= 0 || p.x + p.width > cols ||
            p.y + p.height > rows)
            throw ValidationError("scene spec: patch '" + p.label + "' outside scene bounds");
        if (p.spectrum.size() != n)
            throw ValidationError("scene spec: patch '" + p.label +
                                  "' spectrum length != band count");
        for (Eigen::Index i = 0; i < n; ++i)
            if (p.spectrum(i) < 0.0 || p.spectrum(i) > 1.0)
                throw ValidationError("scene spec: patch '" + p.label +
                                      "' reflectance outside [0,1]");
    }
    for (Eigen::Index i = 0; i < n; ++i)
        if (background(i) < 0.0 || background(i) > 1.0)
            throw ValidationError("scene spec: background reflectance outside [0,1]");
}

SceneSpec default_scene_spec() {
    SceneSpec spec;
    spec.rows = 96;
    spec.cols = 96;
    spec.axis = WavelengthAxis::uniform(450.0, 950.0, 128);
    spec.background = Eigen::VectorXd::Constant(128, 0.4);
    spec.noise_sigma = 0.005;
    spec.seed = 42;

    SensorModel sensor = build_sensor_model(spec.axis);
    NirBump bump;
    bump.center = kDefaultBumpChannel;
    bump.width = kDefaultBumpWidth;
    bump.amplitude = kDefaultBumpAmplitude;
    MetamerPair pair = make_metamer_pair(sensor, spec.background, bump);

    PlacedPatch p;
    p.label = "metamer";
    p.class_name = "metamer";
    p.x = 60;
    p.y = 60;
    p.width = 10;
    p.height = 10;
    p.spectrum = pair.spectrum_b;
    spec.patches.push_back(std::move(p));
    spec.validate();
    return spec;
}

namespace {

Eigen::VectorXd parse_spectrum(const nlohmann::json& j, const WavelengthAxis& axis,
                               const Eigen::VectorXd* background, const std::string& what) {
    const auto n = static_cast<Eigen::Index>(axis.wavelengths_nm.size());
    if (j.is_array()) {
        if (static_cast<Eigen::Index>(j.size()) != n)
            throw ValidationError("scene spec: " + what + " array length != band count");
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = j[static_cast<size_t>(i)].get<double>();
        return v;
    }
    if (j.is_object() && j.contains("flat"))
        return Eigen::VectorXd::Constant(n, j["flat"].get<double>());
    if (j.is_object() && j.contains("metamer_of_background")) {
        if (!background)
            throw ValidationError("scene spec: " + what + " cannot be a metamer of itself");
        const auto& mb = j["metamer_of_background"];
        NirBump bump;
        bump.center = mb.at("center").get<int>();
        bump.width = mb.at("width").get<double>();
        bump.amplitude = mb.at("amplitude").get<double>();
        SensorModel sensor = build_sensor_model(axis);
        return make_metamer_pair(sensor, *background, bump).spectrum_b;
    }
    throw ValidationError("scene spec: " + what +
                          " must be an array, {\"flat\": v}, or {\"metamer_of_background\": ...}");
}

}  // namespace

SceneSpec load_scene_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scene spec: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }

    SceneSpec spec;
    try {
        spec.rows = doc.at("rows").get<int>();
        spec.cols = doc.at("cols").get<int>();
        if (doc.contains("wavelengths_nm")) {
            for (const auto& w : doc["wavelengths_nm"])
                spec.axis.wavelengths_nm.push_back(w.get<double>());
        } else {
            const auto& ax = doc.at("axis");
            spec.axis = WavelengthAxis::uniform(ax.at("first").get<double>(),
                                                ax.at("last").get<double>(),
                                                ax.at("bands").get<int>());
        }
        spec.axis.validate();
        spec.background = parse_spectrum(doc.at("background"), spec.axis, nullptr, "background");
        spec.noise_sigma = doc.value("noise_sigma", 0.0);
        spec.seed = doc.value("seed", std::uint64_t{0});
        for (const auto& pj : doc.value("patches", nlohmann::json::array())) {
            PlacedPatch p;
            p.label = pj.at("label").get<std::string>();
            p.class_name = pj.at("class").get<std::string>();
            p.x = pj.at("x").get<int>();
            p.y = pj.at("y").get<int>();
            p.width = pj.at("w").get<int>();
            p.height = pj.at("h").get<int>();
            p.spectrum =
                parse_spectrum(pj.at("spectrum"), spec.axis, &spec.background, p.label);
            spec.patches.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    spec.validate();
    return spec;
}

GeneratedScene generate_scene(const SceneSpec& spec, const SensorModel& sensor) {
    spec.validate();
    sensor.validate();
    if (sensor.axis.wavelengths_nm != spec.axis.wavelengths_nm)
        throw ValidationError("generate_scene: sensor and scene axes differ");

    const int n_bands = static_cast<int>(spec.axis.wavelengths_nm.size());
    GeneratedScene out;
    out.cube.axis = spec.axis;
    out.cube.rows = spec.rows;
    out.cube.cols = spec.cols;
    out.cube.value_min = 0.0;
    out.cube.value_max = 1.0;
    out.cube.data.resize(static_cast<size_t>(n_bands) * spec.rows * spec.cols);

    // Material index per pixel: -1 background, else placed-patch index (later
    // patches win overlaps).
    std::vector<int> material(static_cast<size_t>(spec.rows) * spec.cols, -1);
    for (size_t pi = 0; pi < spec.patches.size(); ++pi) {
        const auto& p = spec.patches[pi];
        for (int y = p.y; y < p.y + p.height; ++y)
            for (int x = p.x; x < p.x + p.width; ++x)
                material[static_cast<size_t>(y) * spec.cols + x] = static_cast<int>(pi);
    }

    const size_t plane = out.cube.plane_size();
    for (int b = 0; b < n_bands; ++b) {
        float* base = out.cube.data.data() + static_cast<size_t>(b) * plane;
        for (size_t px = 0; px < plane; ++px) {
            const int m = material[px];
            double v = m < 0 ? spec.background(b) : spec.patches[static_cast<size_t>(m)].spectrum(b);
            if (spec.noise_sigma > 0.0)
                v += spec.noise_sigma *
                     rng::gauss_at(spec.seed, static_cast<std::uint64_t>(px),
                                   static_cast<std::uint64_t>(b));
            base[px] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    out.cube.validate();

    // Auto background patch: first window (row-major scan) free of placed
    // patches.
    const int bw = std::min({10, spec.rows, spec.cols});
    int bx = -1, by = -1;
    for (int y = 0; y + bw <= spec.rows && bx < 0; ++y)
        for (int x = 0; x + bw <= spec.cols; ++x) {
            bool free = true;
            for (const auto& p : spec.patches) {
                const bool apart = x + bw <= p.x || p.x + p.width <= x || y + bw <= p.y ||
                                   p.y + p.height <= y;
                if (!apart) {
                    free = false;
                    break;
                }
            }
            if (free) {
                bx = x;
                by = y;
                break;
            }
        }
    if (bx < 0) throw ValidationError("generate_scene: no room for a background patch");

    LabeledPatch bg;
    bg.label = "background";
    bg.class_id = 0;
    bg.x = bx;
    bg.y = by;
    bg.width = bw;
    bg.height = bw;
    out.patches.class_names.push_back("background");
    out.patches.patches.push_back(bg);
    for (size_t pi = 0; pi < spec.patches.size(); ++pi) {
        const auto& p = spec.patches[pi];
        LabeledPatch lp;
        lp.label = p.label;
        lp.x = p.x;
        lp.y = p.y;
        lp.width = p.width;
        lp.height = p.height;
        auto it = std::find(out.patches.class_names.begin(), out.patches.class_names.end(),
                            p.class_name);
        if (it == out.patches.class_names.end()) {
            lp.class_id = static_cast<int>(out.patches.class_names.size());
            out.patches.class_names.push_back(p.class_name);
        } else {
            lp.class_id = static_cast<int>(it - out.patches.class_names.begin());
        }
        out.patches.patches.push_back(std::move(lp));
    }
    out.patches.validate();

    // Camera view of the same noisy scene.
    out.render.width = spec.cols;
    out.render.height = spec.rows;
    out.render.pixels.resize(static_cast<size_t>(spec.rows) * spec.cols * 3);
    for (int y = 0; y < spec.rows; ++y)
        for (int x = 0; x < spec.cols; ++x) {
            const size_t off = static_cast<size_t>(y) * spec.cols + x;
            for (int r = 0; r < 3; ++r) {
                double lin = 0.0;
                for (int b = 0; b < n_bands; ++b)
                    lin += sensor.response(r, b) *
                           out.cube.data[static_cast<size_t>(b) * plane + off];
                lin = std::clamp(lin, 0.0, 1.0);
                out.render.pixels[out.render.index(x, y) + static_cast<size_t>(r)] =
                    quantize8(std::pow(lin, 1.0 / 2.2));
            }
        }
    return out;
}

}  // namespace hsiband
