#include "hsiband/envi_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "hsiband/csv.hpp"
#include "hsiband/error.hpp"

namespace hsiband {
namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Parse the header into a key -> value map. A value starting with '{' runs
// until the matching '}', possibly across lines; braces are stripped.
std::map<std::string, std::string> parse_header(std::istream& in, const std::string& name) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == ';') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            // The conventional "ENVI" magic line and similar bare tokens are
            // tolerated; anything else is a malformed entry.
            if (lower(t) == "envi") continue;
            throw ValidationError(name + ": malformed header line: " + t);
        }
        std::string key = lower(trim(t.substr(0, eq)));
        std::string val = trim(t.substr(eq + 1));
        if (!val.empty() && val[0] == '{') {
            std::string body = val.substr(1);
            while (body.find('}') == std::string::npos) {
                if (!std::getline(in, line))
                    throw ValidationError(name + ": unterminated '{' for key " + key);
                body += ' ';
                body += trim(line);
            }
            body = body.substr(0, body.find('}'));
            val = trim(body);
        }
        if (kv.count(key)) throw ValidationError(name + ": duplicate header key " + key);
        kv[key] = val;
    }
    return kv;
}

long require_int(const std::map<std::string, std::string>& kv, const std::string& key,
                 const std::string& name) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ValidationError(name + ": missing header key " + key);
    try {
        size_t pos = 0;
        long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(name + ": bad integer for " + key + ": " + it->second);
    }
}

std::vector<double> parse_list(const std::string& body, const std::string& what,
                               const std::string& name) {
    std::vector<double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ValidationError(name + ": bad " + what + " entry: " + item);
        }
    }
    return out;
}

}  // namespace

SpectralCube load_cube(const std::filesystem::path& header_path) {
    const std::string name = header_path.string();
    std::ifstream hdr(header_path);
    if (!hdr) throw ValidationError("cannot open header: " + name);
    auto kv = parse_header(hdr, name);

    long cols = require_int(kv, "samples", name);
    long rows = require_int(kv, "lines", name);
    long bands = require_int(kv, "bands", name);
    if (cols <= 0 || rows <= 0 || bands <= 0)
        throw ValidationError(name + ": samples/lines/bands must be positive");

    auto expect = [&](const std::string& key, const std::string& want) {
        auto it = kv.find(key);
        if (it == kv.end()) throw ValidationError(name + ": missing header key " + key);
        if (lower(it->second) != want)
            throw ValidationError(name + ": unsupported " + key + " '" + it->second +
                                  "' (only " + want + ")");
    };
    expect("interleave", "bsq");
    expect("data_type", "4");
    expect("byte_order", "0");

    auto wl_it = kv.find("wavelength");
    if (wl_it == kv.end()) throw ValidationError(name + ": missing header key wavelength");
    SpectralCube cube;
    cube.axis.wavelengths_nm = parse_list(wl_it->second, "wavelength", name);
    if (static_cast<long>(cube.axis.wavelengths_nm.size()) != bands)
        throw ValidationError(name + ": wavelength count " +
                              std::to_string(cube.axis.wavelengths_nm.size()) +
                              " does not match bands " + std::to_string(bands));
    cube.axis.validate();
    cube.rows = static_cast<int>(rows);
    cube.cols = static_cast<int>(cols);

    std::filesystem::path raw_path;
    if (auto it = kv.find("raw_file"); it != kv.end()) {
        raw_path = header_path.parent_path() / it->second;
    } else {
        raw_path = header_path;
        raw_path.replace_extension(".raw");
    }
    std::ifstream raw(raw_path, std::ios::binary);
    if (!raw) throw ValidationError("cannot open payload: " + raw_path.string());

    const size_t count = static_cast<size_t>(rows) * cols * bands;
    cube.data.resize(count);
    static_assert(sizeof(float) == 4 && std::endian::native == std::endian::little,
                  "payload I/O assumes little-endian float32");
    raw.read(reinterpret_cast<char*>(cube.data.data()),
             static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<size_t>(raw.gcount()) != count * sizeof(float))
        throw ValidationError(raw_path.string() + ": payload truncated (expected " +
                              std::to_string(count * sizeof(float)) + " bytes)");
    raw.get();
    if (!raw.eof())
        throw ValidationError(raw_path.string() + ": payload larger than header declares");

    for (float v : cube.data)
        if (!std::isfinite(v)) throw ValidationError(name + ": non-finite value in payload");

    double lo, hi;
    if (auto it = kv.find("value_range"); it != kv.end()) {
        auto vr = parse_list(it->second, "value_range", name);
        if (vr.size() != 2) throw ValidationError(name + ": value_range needs two entries");
        lo = vr[0];
        hi = vr[1];
        if (!(hi > lo)) throw ValidationError(name + ": value_range max must exceed min");
        cube.range_fallback = false;
    } else {
        auto [mn, mx] = std::minmax_element(cube.data.begin(), cube.data.end());
        lo = *mn;
        hi = *mx;
        if (!(hi > lo)) hi = lo + 1.0;  // constant payload: map everything to 0
        cube.range_fallback = true;
    }
    cube.value_min = lo;
    cube.value_max = hi;

    cube.values_clamped = false;
    const double scale = 1.0 / (hi - lo);
    for (float& v : cube.data) {
        double u = (static_cast<double>(v) - lo) * scale;
        if (u < 0.0) { u = 0.0; cube.values_clamped = true; }
        if (u > 1.0) { u = 1.0; cube.values_clamped = true; }
        v = static_cast<float>(u);
    }

    cube.validate();
    return cube;
}

void save_cube(const SpectralCube& cube, const std::filesystem::path& header_path) {
    cube.validate();
    std::filesystem::path raw_path = header_path;
    raw_path.replace_extension(".raw");

    std::ofstream hdr(header_path, std::ios::trunc);
    if (!hdr) throw Error("cannot write header: " + header_path.string());
    hdr << "ENVI\n";
    hdr << "samples = " << cube.cols << "\n";
    hdr << "lines = " << cube.rows << "\n";
    hdr << "bands = " << cube.bands() << "\n";
    hdr << "interleave = bsq\n";
    hdr << "data_type = 4\n";
    hdr << "byte_order = 0\n";
    hdr << "value_range = { 0, 1 }\n";
    // shortest decimal form that parses back to the identical double, so a
    // save/load cycle cannot perturb the axis
    auto exact = [](double v) {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, p);
    };
    hdr << "wavelength = { ";
    for (size_t i = 0; i < cube.axis.wavelengths_nm.size(); ++i) {
        if (i) hdr << ", ";
        hdr << exact(cube.axis.wavelengths_nm[i]);
    }
    hdr << " }\n";
    if (!hdr) throw Error("write failed: " + header_path.string());

    std::ofstream raw(raw_path, std::ios::binary | std::ios::trunc);
    if (!raw) throw Error("cannot write payload: " + raw_path.string());
    raw.write(reinterpret_cast<const char*>(cube.data.data()),
              static_cast<std::streamsize>(cube.data.size() * sizeof(float)));
    if (!raw) throw Error("write failed: " + raw_path.string());
}

PatchSet load_patchset(const std::filesystem::path& path) {
    const std::string name = path.string();
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open patch file: " + name);
    auto rows = read_rows(in);
    if (rows.empty()) throw ValidationError(name + ": empty patch file");

    const std::vector<std::string> want = {"label", "class", "x", "y", "w", "h"};
    if (rows[0] != want)
        throw ValidationError(name + ": expected header label,class,x,y,w,h");

    PatchSet set;
    std::map<std::string, int> class_ids;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 6)
            throw ValidationError(name + ": record " + std::to_string(i + 1) +
                                  " has " + std::to_string(r.size()) + " fields, want 6");
        LabeledPatch p;
        p.label = r[0];
        if (p.label.empty())
            throw ValidationError(name + ": record " + std::to_string(i + 1) + " has empty label");
        const std::string& cls = r[1];
        if (cls.empty())
            throw ValidationError(name + ": record " + std::to_string(i + 1) + " has empty class");
        auto geom = [&](const std::string& field, int row) -> int {
            try {
                size_t pos = 0;
                long v = std::stol(field, &pos);
                if (pos != field.size()) throw std::invalid_argument("trailing");
                return static_cast<int>(v);
            } catch (const std::exception&) {
                throw ValidationError(name + ": record " + std::to_string(row) +
                                      " has non-integer geometry: " + field);
            }
        };
        p.x = geom(r[2], static_cast<int>(i + 1));
        p.y = geom(r[3], static_cast<int>(i + 1));
        p.width = geom(r[4], static_cast<int>(i + 1));
        p.height = geom(r[5], static_cast<int>(i + 1));
        if (p.x < 0 || p.y < 0 || p.width <= 0 || p.height <= 0)
            throw ValidationError(name + ": record " + std::to_string(i + 1) +
                                  " has invalid geometry");
        auto [it, fresh] = class_ids.try_emplace(cls, static_cast<int>(set.class_names.size()));
        if (fresh) set.class_names.push_back(cls);
        p.class_id = it->second;
        set.patches.push_back(std::move(p));
    }
    if (set.patches.empty()) throw ValidationError(name + ": no patch records");
    set.validate();
    return set;
}

void save_patchset(const PatchSet& patches, const std::filesystem::path& path) {
    patches.validate();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write patch file: " + path.string());
    out << "label,class,x,y,w,h\n";
    for (const auto& p : patches.patches) {
        out << p.label << ',' << patches.class_names.at(p.class_id) << ',' << p.x << ','
            << p.y << ',' << p.width << ',' << p.height << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace hsiband
