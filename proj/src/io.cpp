#include "travmap/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace travmap::io {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

// %.10g round-trips the doubles we care about and keeps files compact and
// byte-stable across runs.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

template <typename T>
void write_raw(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const std::string& path) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw InputError("'" + path + "': truncated file");
    return value;
}

bool is_blank(const std::string& s) { return trim(s).empty(); }

}  // namespace

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& text, const std::string& context) {
    const std::string t = trim(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw InputError(context + ": expected a number, got '" + t + "'");
    }
}

long parse_long(const std::string& text, const std::string& context) {
    const std::string t = trim(text);
    try {
        std::size_t used = 0;
        const long v = std::stol(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw InputError(context + ": expected an integer, got '" + t + "'");
    }
}

std::string read_text_file(const std::string& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out << content;
    if (!out) throw InputError("failed writing '" + path + "'");
}

// --- INI ----------------------------------------------------------------------

bool IniSection::has(const std::string& key) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const auto& e) { return e.first == key; });
}

const std::string& IniSection::get(const std::string& key) const {
    for (const auto& e : entries)
        if (e.first == key) return e.second;
    throw InputError("[" + name + "]: missing key '" + key + "'");
}

std::string IniSection::get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double IniSection::get_double(const std::string& key) const {
    return parse_double(get(key), "[" + name + "] " + key);
}

double IniSection::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long IniSection::get_long_or(const std::string& key, long fallback) const {
    return has(key) ? parse_long(get(key), "[" + name + "] " + key) : fallback;
}

std::vector<double> IniSection::get_doubles(const std::string& key) const {
    std::istringstream stream(get(key));
    std::vector<double> out;
    std::string token;
    while (stream >> token) out.push_back(parse_double(token, "[" + name + "] " + key));
    return out;
}

const IniSection* IniFile::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

std::vector<const IniSection*> IniFile::all(const std::string& name) const {
    std::vector<const IniSection*> out;
    for (const auto& s : sections)
        if (s.name == name) out.push_back(&s);
    return out;
}

IniFile parse_ini(const std::string& text, const std::string& origin) {
    IniFile file;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.resize(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw InputError(origin + ":" + std::to_string(line_no) + ": unterminated section");
            file.sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        if (file.sections.empty())
            throw InputError(origin + ":" + std::to_string(line_no) + ": key outside any section");
        file.sections.back().entries.emplace_back(trim(line.substr(0, eq)),
                                                  trim(line.substr(eq + 1)));
    }
    return file;
}

IniFile load_ini(const std::string& path) { return parse_ini(read_text_file(path), path); }

// --- point clouds ----------------------------------------------------------------

std::vector<fusion::LidarPoint> load_cloud_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<fusion::LidarPoint> cloud;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        if (line_no == 1 && line.find("x") != std::string::npos &&
            line.find_first_of("0123456789") == std::string::npos)
            continue;  // header row
        const auto fields = split(line, ',');
        if (fields.size() != 3 && fields.size() != 4)
            throw InputError(path + ":" + std::to_string(line_no) + ": expected x,y,z[,intensity]");
        fusion::LidarPoint p;
        const std::string ctx = path + ":" + std::to_string(line_no);
        p.x = parse_double(fields[0], ctx);
        p.y = parse_double(fields[1], ctx);
        p.z = parse_double(fields[2], ctx);
        if (fields.size() == 4 && !is_blank(fields[3]))
            p.intensity = parse_double(fields[3], ctx);
        p.validate();
        cloud.push_back(p);
    }
    return cloud;
}

void save_cloud_csv(const std::string& path, const std::vector<fusion::LidarPoint>& cloud) {
    auto out = open_out(path);
    out << "x,y,z,intensity\n";
    for (const auto& p : cloud) {
        out << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.z) << ',';
        if (p.intensity) out << fmt(*p.intensity);
        out << '\n';
    }
}

namespace {
constexpr char kCloudMagic[4] = {'T', 'V', 'C', 'L'};
constexpr char kCubeMagic[4] = {'T', 'V', 'C', 'B'};
}  // namespace

void save_cloud_bin(const std::string& path, const std::vector<fusion::LidarPoint>& cloud) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(kCloudMagic, 4);
    write_raw<std::uint32_t>(out, 1);  // version
    write_raw<std::uint64_t>(out, cloud.size());
    const bool has_intensity =
        std::any_of(cloud.begin(), cloud.end(), [](const auto& p) { return bool(p.intensity); });
    write_raw<std::uint8_t>(out, has_intensity ? 1 : 0);
    for (const auto& p : cloud) {
        write_raw<double>(out, p.x);
        write_raw<double>(out, p.y);
        write_raw<double>(out, p.z);
        if (has_intensity) write_raw<double>(out, p.intensity.value_or(0.0));
    }
}

std::vector<fusion::LidarPoint> load_cloud_bin(const std::string& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kCloudMagic, 4) != 0)
        throw InputError("'" + path + "': not a point cloud file");
    if (read_raw<std::uint32_t>(in, path) != 1)
        throw InputError("'" + path + "': unsupported version");
    const auto count = read_raw<std::uint64_t>(in, path);
    const bool has_intensity = read_raw<std::uint8_t>(in, path) != 0;
    std::vector<fusion::LidarPoint> cloud;
    cloud.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        fusion::LidarPoint p;
        p.x = read_raw<double>(in, path);
        p.y = read_raw<double>(in, path);
        p.z = read_raw<double>(in, path);
        if (has_intensity) p.intensity = read_raw<double>(in, path);
        p.validate();
        cloud.push_back(p);
    }
    return cloud;
}

std::vector<fusion::LidarPoint> load_cloud(const std::string& path) {
    return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? load_cloud_csv(path)
                                                                      : load_cloud_bin(path);
}

// --- cubes -------------------------------------------------------------------------

spectral::SpectralCube load_cube_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("'" + path + "': empty file");
    auto header = split(line, ',');
    if (header.size() < 3 || trim(header[0]) != "x" || trim(header[1]) != "y")
        throw InputError("'" + path + "': header must be x,y,<wavelengths...>");

    spectral::SpectralCube cube;
    for (std::size_t i = 2; i < header.size(); ++i)
        cube.wavelengths_nm.push_back(parse_double(header[i], path + ": header"));

    struct Pixel {
        int x, y;
        std::vector<float> values;
    };
    std::vector<Pixel> pixels;
    int max_x = -1, max_y = -1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        const auto fields = split(line, ',');
        const std::string ctx = path + ":" + std::to_string(line_no);
        if (fields.size() != header.size())
            throw InputError(ctx + ": field count does not match header");
        Pixel px;
        px.x = static_cast<int>(parse_long(fields[0], ctx));
        px.y = static_cast<int>(parse_long(fields[1], ctx));
        if (px.x < 0 || px.y < 0) throw InputError(ctx + ": negative pixel coordinate");
        for (std::size_t b = 2; b < fields.size(); ++b)
            px.values.push_back(static_cast<float>(parse_double(fields[b], ctx)));
        max_x = std::max(max_x, px.x);
        max_y = std::max(max_y, px.y);
        pixels.push_back(std::move(px));
    }
    if (pixels.empty()) throw InputError("'" + path + "': no pixels");
    cube.width = max_x + 1;
    cube.height = max_y + 1;
    const auto expected = static_cast<std::size_t>(cube.width) * static_cast<std::size_t>(cube.height);
    if (pixels.size() != expected)
        throw InputError("'" + path + "': missing pixels (got " + std::to_string(pixels.size()) +
                         ", image is " + std::to_string(cube.width) + "x" +
                         std::to_string(cube.height) + ")");
    cube.planes.assign(cube.wavelengths_nm.size() * expected, 0.0f);
    for (const auto& px : pixels)
        for (std::size_t b = 0; b < px.values.size(); ++b)
            cube.at(b, px.x, px.y) = px.values[b];
    cube.validate();
    return cube;
}

void save_cube_csv(const std::string& path, const spectral::SpectralCube& cube) {
    cube.validate();
    auto out = open_out(path);
    out << "x,y";
    for (double w : cube.wavelengths_nm) out << ',' << fmt(w);
    out << '\n';
    for (int y = 0; y < cube.height; ++y) {
        for (int x = 0; x < cube.width; ++x) {
            out << x << ',' << y;
            for (std::size_t b = 0; b < cube.wavelengths_nm.size(); ++b)
                out << ',' << fmt(cube.at(b, x, y));
            out << '\n';
        }
    }
}

void save_cube_bin(const std::string& path, const spectral::SpectralCube& cube) {
    cube.validate();
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(kCubeMagic, 4);
    write_raw<std::uint32_t>(out, 1);  // version
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(cube.width));
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(cube.height));
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(cube.wavelengths_nm.size()));
    for (double w : cube.wavelengths_nm) write_raw<double>(out, w);
    out.write(reinterpret_cast<const char*>(cube.planes.data()),
              static_cast<std::streamsize>(cube.planes.size() * sizeof(float)));
}

spectral::SpectralCube load_cube_bin(const std::string& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kCubeMagic, 4) != 0)
        throw InputError("'" + path + "': not a spectral cube file");
    if (read_raw<std::uint32_t>(in, path) != 1)
        throw InputError("'" + path + "': unsupported version");
    spectral::SpectralCube cube;
    cube.width = static_cast<int>(read_raw<std::uint32_t>(in, path));
    cube.height = static_cast<int>(read_raw<std::uint32_t>(in, path));
    const auto bands = read_raw<std::uint32_t>(in, path);
    cube.wavelengths_nm.resize(bands);
    for (auto& w : cube.wavelengths_nm) w = read_raw<double>(in, path);
    cube.planes.resize(static_cast<std::size_t>(cube.width) * static_cast<std::size_t>(cube.height) *
                       bands);
    in.read(reinterpret_cast<char*>(cube.planes.data()),
            static_cast<std::streamsize>(cube.planes.size() * sizeof(float)));
    if (!in) throw InputError("'" + path + "': truncated file");
    cube.validate();
    return cube;
}

spectral::SpectralCube load_cube(const std::string& path) {
    return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? load_cube_csv(path)
                                                                      : load_cube_bin(path);
}

spectral::SpectralCalibration load_spectral_calibration(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("'" + path + "': empty file");
    spectral::SpectralCalibration cal;
    for (const auto& field : split(line, ','))
        cal.output_wavelengths_nm.push_back(parse_double(field, path + ": wavelength header"));

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        std::vector<double> row;
        for (const auto& field : split(line, ','))
            row.push_back(parse_double(field, path + ":" + std::to_string(line_no)));
        if (!rows.empty() && row.size() != rows.front().size())
            throw InputError(path + ":" + std::to_string(line_no) + ": ragged matrix row");
        rows.push_back(std::move(row));
    }
    if (rows.size() != cal.output_wavelengths_nm.size())
        throw InputError("'" + path + "': matrix row count != wavelength count");
    cal.matrix.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            cal.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    cal.validate();
    return cal;
}

// --- camera rig ------------------------------------------------------------------------

scenario::CameraRig load_camera_rig(const std::string& path) {
    const IniFile ini = load_ini(path);
    const IniSection* intr = ini.find("intrinsics");
    const IniSection* extr = ini.find("extrinsics");
    if (!intr) throw InputError("'" + path + "': missing [intrinsics] section");
    if (!extr) throw InputError("'" + path + "': missing [extrinsics] section");

    scenario::CameraRig rig;
    rig.intrinsics.fx = intr->get_double("fx");
    rig.intrinsics.fy = intr->get_double("fy");
    rig.intrinsics.cx = intr->get_double("cx");
    rig.intrinsics.cy = intr->get_double("cy");
    rig.intrinsics.width = static_cast<int>(intr->get_long_or("width", 0));
    rig.intrinsics.height = static_cast<int>(intr->get_long_or("height", 0));
    if (intr->has("distortion")) rig.intrinsics.distortion = intr->get_doubles("distortion");

    if (extr->has("rotation")) {
        const auto r = extr->get_doubles("rotation");
        if (r.size() != 9)
            throw InputError("'" + path + "': rotation needs 9 row-major values");
        rig.extrinsics.rotation << r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8];
    } else if (extr->has("quaternion")) {
        const auto q = extr->get_doubles("quaternion");
        if (q.size() != 4) throw InputError("'" + path + "': quaternion needs w x y z");
        rig.extrinsics.rotation =
            Eigen::Quaterniond(q[0], q[1], q[2], q[3]).normalized().toRotationMatrix();
    } else {
        throw InputError("'" + path + "': [extrinsics] needs rotation or quaternion");
    }
    const auto t = extr->get_doubles("translation");
    if (t.size() != 3) throw InputError("'" + path + "': translation needs 3 values");
    rig.extrinsics.translation = Eigen::Vector3d(t[0], t[1], t[2]);

    rig.intrinsics.validate();
    rig.extrinsics.validate();
    return rig;
}

void save_camera_rig(const std::string& path, const scenario::CameraRig& rig) {
    std::ostringstream out;
    out << "[intrinsics]\n";
    out << "fx = " << fmt(rig.intrinsics.fx) << "\nfy = " << fmt(rig.intrinsics.fy) << '\n';
    out << "cx = " << fmt(rig.intrinsics.cx) << "\ncy = " << fmt(rig.intrinsics.cy) << '\n';
    out << "width = " << rig.intrinsics.width << "\nheight = " << rig.intrinsics.height << '\n';
    if (!rig.intrinsics.distortion.empty()) {
        out << "distortion =";
        for (double d : rig.intrinsics.distortion) out << ' ' << fmt(d);
        out << '\n';
    }
    out << "\n[extrinsics]\nrotation =";
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out << ' ' << fmt(rig.extrinsics.rotation(r, c));
    out << "\ntranslation = " << fmt(rig.extrinsics.translation.x()) << ' '
        << fmt(rig.extrinsics.translation.y()) << ' ' << fmt(rig.extrinsics.translation.z())
        << '\n';
    write_text_file(path, out.str());
}

// --- augmented clouds ---------------------------------------------------------------------

void save_augmented_csv(const std::string& path, const std::vector<fusion::AugmentedPoint>& cloud,
                        const std::vector<double>& wavelengths_nm) {
    auto out = open_out(path);
    out << "x,y,z,plants_probability,mass_density";
    for (double w : wavelengths_nm) out << ",refl_" << fmt(w);
    out << '\n';
    for (const auto& p : cloud) {
        out << fmt(p.position.x()) << ',' << fmt(p.position.y()) << ',' << fmt(p.position.z());
        out << ',';
        if (p.plants_probability) out << fmt(*p.plants_probability);
        out << ',';
        if (p.mass_density) out << fmt(*p.mass_density);
        for (std::size_t b = 0; b < wavelengths_nm.size(); ++b) {
            out << ',';
            if (p.reflectance) out << fmt(p.reflectance->values[b]);
        }
        out << '\n';
    }
}

AugmentedCloud load_augmented_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("'" + path + "': empty file");
    const auto header = split(line, ',');
    if (header.size() < 5 || trim(header[0]) != "x" || trim(header[1]) != "y" ||
        trim(header[2]) != "z" || trim(header[3]) != "plants_probability" ||
        trim(header[4]) != "mass_density")
        throw InputError("'" + path + "': unexpected augmented cloud header");

    AugmentedCloud cloud;
    for (std::size_t i = 5; i < header.size(); ++i) {
        const std::string h = trim(header[i]);
        if (h.rfind("refl_", 0) != 0)
            throw InputError("'" + path + "': band column '" + h + "' must be refl_<nm>");
        cloud.wavelengths_nm.push_back(parse_double(h.substr(5), path + ": header"));
    }

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        const auto fields = split(line, ',');
        const std::string ctx = path + ":" + std::to_string(line_no);
        if (fields.size() != header.size())
            throw InputError(ctx + ": field count does not match header");
        fusion::AugmentedPoint p;
        p.position = Eigen::Vector3d(parse_double(fields[0], ctx), parse_double(fields[1], ctx),
                                     parse_double(fields[2], ctx));
        if (!is_blank(fields[3])) p.plants_probability = parse_double(fields[3], ctx);
        if (!is_blank(fields[4])) p.mass_density = parse_double(fields[4], ctx);

        std::size_t present = 0;
        for (std::size_t b = 0; b < cloud.wavelengths_nm.size(); ++b)
            if (!is_blank(fields[5 + b])) ++present;
        if (present == cloud.wavelengths_nm.size() && present > 0) {
            spectral::ReflectanceSpectrum s;
            s.wavelengths_nm = cloud.wavelengths_nm;
            s.values.resize(present);
            for (std::size_t b = 0; b < present; ++b)
                s.values[b] = parse_double(fields[5 + b], ctx);
            p.reflectance = std::move(s);
        } else if (present != 0) {
            throw InputError(ctx + ": partial spectrum (fill all bands or none)");
        }
        if (p.plants_probability && !p.reflectance)
            throw InputError(ctx + ": plants_probability without reflectance");
        cloud.points.push_back(std::move(p));
    }
    return cloud;
}

// --- labeled maps ------------------------------------------------------------------------

void save_labeled_csv(const std::string& path,
                      const std::vector<semantics::LabeledMapPoint>& points) {
    auto out = open_out(path);
    out << "x,y,z,label";
    if (!points.empty())
        for (double w : points.front().reflectance.wavelengths_nm) out << ",refl_" << fmt(w);
    out << '\n';
    for (const auto& p : points) {
        out << fmt(p.position.x()) << ',' << fmt(p.position.y()) << ',' << fmt(p.position.z())
            << ',' << semantics::to_string(p.label);
        for (double v : p.reflectance.values) out << ',' << fmt(v);
        out << '\n';
    }
}

std::vector<semantics::LabeledMapPoint> load_labeled_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("'" + path + "': empty file");
    const auto header = split(line, ',');
    if (header.size() < 4 || trim(header[0]) != "x" || trim(header[3]) != "label")
        throw InputError("'" + path + "': expected header x,y,z,label,refl_<nm>...");
    std::vector<double> wavelengths;
    for (std::size_t i = 4; i < header.size(); ++i) {
        const std::string h = trim(header[i]);
        if (h.rfind("refl_", 0) != 0)
            throw InputError("'" + path + "': band column '" + h + "' must be refl_<nm>");
        wavelengths.push_back(parse_double(h.substr(5), path + ": header"));
    }
    if (wavelengths.empty()) throw InputError("'" + path + "': no spectral bands");

    std::vector<semantics::LabeledMapPoint> points;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        const auto fields = split(line, ',');
        const std::string ctx = path + ":" + std::to_string(line_no);
        if (fields.size() != header.size())
            throw InputError(ctx + ": field count does not match header");
        semantics::LabeledMapPoint p;
        p.position = Eigen::Vector3d(parse_double(fields[0], ctx), parse_double(fields[1], ctx),
                                     parse_double(fields[2], ctx));
        p.label = semantics::label_from_string(trim(fields[3]));
        p.reflectance.wavelengths_nm = wavelengths;
        p.reflectance.values.resize(wavelengths.size());
        for (std::size_t b = 0; b < wavelengths.size(); ++b)
            p.reflectance.values[b] = parse_double(fields[4 + b], ctx);
        points.push_back(std::move(p));
    }
    if (points.empty()) throw InputError("'" + path + "': no points");
    return points;
}

// --- grids --------------------------------------------------------------------------------

namespace {

void save_pgm(const std::string& path, int width, int height,
              const std::vector<std::uint8_t>& gray) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray.data()),
              static_cast<std::streamsize>(gray.size()));
}

std::uint8_t density_gray(double density, double max_density) {
    if (!(max_density > 0.0) || density <= 0.0) return 0;
    const double g = 255.0 * std::log1p(density) / std::log1p(max_density);
    return static_cast<std::uint8_t>(std::clamp(std::lround(g), 0L, 255L));
}

}  // namespace

void save_grid(const std::string& prefix, const mapping::MassDensityGrid& grid) {
    grid.validate();
    {
        auto out = open_out(prefix + ".csv");
        for (int iy = 0; iy < grid.height; ++iy) {
            for (int ix = 0; ix < grid.width; ++ix) {
                if (ix) out << ',';
                out << fmt(grid.value_at(ix, iy));
            }
            out << '\n';
        }
    }
    {
        json j;
        j["cell_size_m"] = grid.cell_size;
        j["origin_x"] = grid.origin_x;
        j["origin_y"] = grid.origin_y;
        j["width"] = grid.width;
        j["height"] = grid.height;
        j["default_density"] = grid.default_density;
        std::vector<std::string> state_rows;
        for (int iy = 0; iy < grid.height; ++iy) {
            std::string row(static_cast<std::size_t>(grid.width), 'U');
            for (int ix = 0; ix < grid.width; ++ix)
                if (grid.state_at(ix, iy) == mapping::CellState::Observed)
                    row[static_cast<std::size_t>(ix)] = 'O';
            state_rows.push_back(std::move(row));
        }
        j["state"] = state_rows;
        write_text_file(prefix + ".json", j.dump(2) + "\n");
    }
    {
        double max_density = grid.default_density;
        for (double v : grid.values) max_density = std::max(max_density, v);
        std::vector<std::uint8_t> gray(grid.values.size());
        // PGM rows run top to bottom; flip so +y points up in the image.
        for (int iy = 0; iy < grid.height; ++iy)
            for (int ix = 0; ix < grid.width; ++ix)
                gray[static_cast<std::size_t>(grid.height - 1 - iy) *
                         static_cast<std::size_t>(grid.width) +
                     static_cast<std::size_t>(ix)] =
                    density_gray(grid.value_at(ix, iy), max_density);
        save_pgm(prefix + ".pgm", grid.width, grid.height, gray);
    }
}

mapping::MassDensityGrid load_grid(const std::string& prefix) {
    json j;
    try {
        j = json::parse(read_text_file(prefix + ".json"));
    } catch (const json::parse_error& e) {
        throw InputError("'" + prefix + ".json': " + e.what());
    }
    mapping::MassDensityGrid grid;
    try {
        grid.cell_size = j.at("cell_size_m").get<double>();
        grid.origin_x = j.at("origin_x").get<double>();
        grid.origin_y = j.at("origin_y").get<double>();
        grid.width = j.at("width").get<int>();
        grid.height = j.at("height").get<int>();
        grid.default_density = j.at("default_density").get<double>();
        const auto state_rows = j.at("state").get<std::vector<std::string>>();
        if (static_cast<int>(state_rows.size()) != grid.height)
            throw InputError("'" + prefix + ".json': state row count != height");
        grid.states.assign(
            static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height),
            mapping::CellState::Unknown);
        for (int iy = 0; iy < grid.height; ++iy) {
            const auto& row = state_rows[static_cast<std::size_t>(iy)];
            if (static_cast<int>(row.size()) != grid.width)
                throw InputError("'" + prefix + ".json': state row length != width");
            for (int ix = 0; ix < grid.width; ++ix)
                if (row[static_cast<std::size_t>(ix)] == 'O')
                    grid.states[grid.offset(ix, iy)] = mapping::CellState::Observed;
        }
    } catch (const json::exception& e) {
        throw InputError("'" + prefix + ".json': " + e.what());
    }

    auto in = open_in(prefix + ".csv");
    std::string line;
    int iy = 0;
    grid.values.assign(grid.states.size(), 0.0);
    while (std::getline(in, line)) {
        if (is_blank(line)) continue;
        if (iy >= grid.height) throw InputError("'" + prefix + ".csv': more rows than height");
        const auto fields = split(line, ',');
        if (static_cast<int>(fields.size()) != grid.width)
            throw InputError("'" + prefix + ".csv': row " + std::to_string(iy) +
                             " width mismatch");
        for (int ix = 0; ix < grid.width; ++ix)
            grid.values[grid.offset(ix, iy)] =
                parse_double(fields[static_cast<std::size_t>(ix)],
                             prefix + ".csv row " + std::to_string(iy));
        ++iy;
    }
    if (iy != grid.height) throw InputError("'" + prefix + ".csv': fewer rows than height");
    grid.validate();
    return grid;
}

// --- candidates and costs -------------------------------------------------------------------

std::vector<traversal::PathCandidate> load_candidates_json(const std::string& path,
                                                           double default_width_m) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "': " + e.what());
    }
    if (!j.is_object() || !j.contains("candidates") || !j["candidates"].is_array())
        throw InputError("'" + path + "': expected top-level field 'candidates' (array)");

    std::vector<traversal::PathCandidate> out;
    std::size_t idx = 0;
    for (const auto& c : j["candidates"]) {
        const std::string where = "'" + path + "' candidates[" + std::to_string(idx) + "]";
        if (!c.is_object()) throw InputError(where + ": expected an object");
        traversal::PathCandidate cand;
        if (!c.contains("id") || !c["id"].is_string())
            throw InputError(where + ": missing string field 'id'");
        cand.id = c["id"].get<std::string>();
        if (c.contains("width")) {
            if (!c["width"].is_number()) throw InputError(where + ": field 'width' must be a number");
            cand.swept_width_m = c["width"].get<double>();
        } else {
            cand.swept_width_m = default_width_m;
        }
        if (!c.contains("waypoints") || !c["waypoints"].is_array())
            throw InputError(where + ": missing array field 'waypoints'");
        for (const auto& w : c["waypoints"]) {
            if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
                throw InputError(where + ": waypoints must be [x, y] pairs");
            cand.waypoints.emplace_back(w[0].get<double>(), w[1].get<double>());
        }
        try {
            cand.validate();
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
        out.push_back(std::move(cand));
        ++idx;
    }
    if (out.empty()) throw InputError("'" + path + "': no candidates");
    return out;
}

void save_candidates_json(const std::string& path,
                          const std::vector<traversal::PathCandidate>& candidates) {
    json arr = json::array();
    for (const auto& c : candidates) {
        json jc;
        jc["id"] = c.id;
        jc["width"] = c.swept_width_m;
        json wps = json::array();
        for (const auto& w : c.waypoints) wps.push_back({w.x(), w.y()});
        jc["waypoints"] = wps;
        arr.push_back(jc);
    }
    json j;
    j["candidates"] = arr;
    write_text_file(path, j.dump(2) + "\n");
}

void save_cost_csv(const std::string& path, const traversal::EvaluationResult& result) {
    auto out = open_out(path);
    out << "id,alpha,crossed_area_m2,integrated_mass_kg,energy_loss_ratio,selected\n";
    for (const auto& c : result.costs) {
        out << c.id << ',' << fmt(c.alpha) << ',' << fmt(c.crossed_area_m2) << ','
            << fmt(c.integrated_mass_kg) << ',' << fmt(traversal::kinetic_energy_loss(c.alpha))
            << ',' << (c.id == result.selected_id ? 1 : 0) << '\n';
    }
}

void save_cost_json(const std::string& path, const traversal::EvaluationResult& result) {
    json costs = json::array();
    for (const auto& c : result.costs) {
        json jc;
        jc["id"] = c.id;
        jc["alpha"] = c.alpha;
        jc["crossed_area_m2"] = c.crossed_area_m2;
        jc["integrated_mass_kg"] = c.integrated_mass_kg;
        jc["energy_loss_ratio"] = traversal::kinetic_energy_loss(c.alpha);
        json cells = json::array();
        for (const auto& cell : c.per_cell) {
            json jcell;
            jcell["ix"] = cell.ix;
            jcell["iy"] = cell.iy;
            jcell["in_bounds"] = cell.in_bounds;
            jcell["density_kg_m2"] = cell.density_kg_m2;
            jcell["mass_kg"] = cell.mass_kg;
            cells.push_back(jcell);
        }
        jc["cells"] = cells;
        costs.push_back(jc);
    }
    json j;
    j["selected"] = result.selected_id;
    j["costs"] = costs;
    write_text_file(path, j.dump(2) + "\n");
}

void save_cost_overlay_pgm(const std::string& path, const mapping::MassDensityGrid& grid,
                           const traversal::EvaluationResult& result,
                           const std::vector<traversal::PathCandidate>& candidates) {
    grid.validate();
    double max_density = grid.default_density;
    for (double v : grid.values) max_density = std::max(max_density, v);

    // Base layer in [0, 120]; paths drawn over it in [135, 255] by alpha.
    std::vector<std::uint8_t> gray(grid.values.size());
    for (int iy = 0; iy < grid.height; ++iy)
        for (int ix = 0; ix < grid.width; ++ix)
            gray[static_cast<std::size_t>(grid.height - 1 - iy) *
                     static_cast<std::size_t>(grid.width) +
                 static_cast<std::size_t>(ix)] = static_cast<std::uint8_t>(
                density_gray(grid.value_at(ix, iy), max_density) * 120 / 255);

    auto draw = [&](const traversal::TraversalCost& cost) {
        const auto level =
            static_cast<std::uint8_t>(135 + std::lround(std::clamp(cost.alpha, 0.0, 1.0) * 120.0));
        for (const auto& cell : cost.per_cell) {
            if (!grid.in_bounds(cell.ix, cell.iy)) continue;
            gray[static_cast<std::size_t>(grid.height - 1 - cell.iy) *
                     static_cast<std::size_t>(grid.width) +
                 static_cast<std::size_t>(cell.ix)] = level;
        }
    };
    for (const auto& c : result.costs)
        if (c.id != result.selected_id) draw(c);
    for (const auto& c : result.costs)
        if (c.id == result.selected_id) draw(c);
    (void)candidates;
    save_pgm(path, grid.width, grid.height, gray);
}

// --- segmentation reports ---------------------------------------------------------------------

void save_reports_csv(const std::string& path,
                      const std::vector<semantics::SegmentationReport>& reports) {
    auto out = open_out(path);
    out << "method,iou,precision,recall,accuracy,f1,specificity,duration_ms,degenerate\n";
    for (const auto& r : reports) {
        out << r.method_name << ',' << fmt(r.iou) << ',' << fmt(r.precision) << ',' << fmt(r.recall)
            << ',' << fmt(r.accuracy) << ',' << fmt(r.f1) << ',' << fmt(r.specificity) << ','
            << fmt(r.duration_ms) << ',' << (r.degenerate ? 1 : 0) << '\n';
    }
}

std::string format_report_table(const std::vector<semantics::SegmentationReport>& reports) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-8s %6s %6s %6s %6s %6s %6s %9s\n", "Method", "IoU",
                  "Prec.", "Rec.", "Acc.", "F1", "Spec.", "dt[ms]");
    out << line;
    out << std::string(58, '-') << '\n';
    for (const auto& r : reports) {
        std::snprintf(line, sizeof(line), "%-8s %6.3f %6.3f %6.3f %6.3f %6.3f %6.3f %9.2f\n",
                      r.method_name.c_str(), r.iou, r.precision, r.recall, r.accuracy, r.f1,
                      r.specificity, r.duration_ms);
        out << line;
    }
    return out.str();
}

// --- pose manifests ------------------------------------------------------------------------------

std::vector<CloudEntry> load_cloud_manifest(const std::string& path) {
    auto in = open_in(path);
    const auto dir = std::filesystem::path(path).parent_path();
    std::vector<CloudEntry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream stream(line);
        CloudEntry entry;
        std::string file;
        stream >> file;
        std::vector<double> nums;
        double v;
        while (stream >> v) nums.push_back(v);
        const std::string ctx = path + ":" + std::to_string(line_no);
        if (!nums.empty() && nums.size() != 7)
            throw InputError(ctx + ": expected <file> [tx ty tz qw qx qy qz]");
        if (nums.size() == 7) {
            entry.pose.sensor_to_world.translation = Eigen::Vector3d(nums[0], nums[1], nums[2]);
            Eigen::Quaterniond q(nums[3], nums[4], nums[5], nums[6]);
            if (q.norm() == 0.0) throw InputError(ctx + ": zero quaternion");
            entry.pose.sensor_to_world.rotation = q.normalized().toRotationMatrix();
        }
        const std::filesystem::path file_path(file);
        entry.path = file_path.is_absolute() ? file_path.string() : (dir / file_path).string();
        entries.push_back(std::move(entry));
    }
    return entries;
}

// --- scene specs -----------------------------------------------------------------------------------

scenario::SceneSpec load_scene_spec(const std::string& path) {
    const IniFile ini = load_ini(path);
    const IniSection* s = ini.find("scene");
    if (!s) throw InputError("'" + path + "': missing [scene] section");

    scenario::SceneSpec spec;
    spec.seed = static_cast<std::uint64_t>(s->get_long_or("seed", 1));
    spec.extent_x = s->get_double("extent_x");
    spec.extent_y = s->get_double("extent_y");
    spec.noise_sigma = s->get_double_or("noise_sigma", 0.0);
    spec.illumination_min = s->get_double_or("illumination_min", 1.0);
    spec.illumination_max = s->get_double_or("illumination_max", 1.0);
    spec.cell_size = s->get_double_or("cell_size", 0.5);
    spec.ground_threshold = s->get_double_or("ground_threshold", 0.05);
    spec.ugv_height = s->get_double_or("ugv_height", 1.0);
    spec.plants_density = s->get_double_or("plants_density", 20.0);
    spec.not_plants_density = s->get_double_or("not_plants_density", 2400.0);
    spec.unknown_density = s->get_double_or("unknown_density", 250.0);
    spec.band_grid = scenario::standard_band_grid();

    for (const IniSection* p : ini.all("primitive")) {
        scenario::ScenePrimitive prim;
        prim.shape = scenario::shape_from_string(p->get("shape"));
        prim.label = semantics::label_from_string(p->get("label"));
        prim.point_density = p->get_double("density");
        const auto z = p->get_doubles("z");
        if (z.size() != 2) throw InputError("'" + path + "': primitive z needs min max");
        prim.z_min = z[0];
        prim.z_max = z[1];
        if (prim.shape == scenario::PrimitiveShape::Disk) {
            const auto d = p->get_doubles("disk");
            if (d.size() != 3) throw InputError("'" + path + "': disk needs cx cy radius");
            prim.cx = d[0];
            prim.cy = d[1];
            prim.radius = d[2];
        } else {
            const auto r = p->get_doubles("rect");
            if (r.size() != 4) throw InputError("'" + path + "': rect needs x0 y0 x1 y1");
            prim.x0 = r[0];
            prim.y0 = r[1];
            prim.x1 = r[2];
            prim.y1 = r[3];
        }
        spec.primitives.push_back(prim);
    }
    spec.validate();
    return spec;
}

void save_scene_spec(const std::string& path, const scenario::SceneSpec& spec) {
    std::ostringstream out;
    out << "[scene]\n";
    out << "seed = " << spec.seed << '\n';
    out << "extent_x = " << fmt(spec.extent_x) << "\nextent_y = " << fmt(spec.extent_y) << '\n';
    out << "noise_sigma = " << fmt(spec.noise_sigma) << '\n';
    out << "illumination_min = " << fmt(spec.illumination_min) << '\n';
    out << "illumination_max = " << fmt(spec.illumination_max) << '\n';
    out << "cell_size = " << fmt(spec.cell_size) << '\n';
    out << "ground_threshold = " << fmt(spec.ground_threshold) << '\n';
    out << "ugv_height = " << fmt(spec.ugv_height) << '\n';
    out << "plants_density = " << fmt(spec.plants_density) << '\n';
    out << "not_plants_density = " << fmt(spec.not_plants_density) << '\n';
    out << "unknown_density = " << fmt(spec.unknown_density) << '\n';
    for (const auto& p : spec.primitives) {
        out << "\n[primitive]\n";
        out << "shape = " << scenario::to_string(p.shape) << '\n';
        out << "label = " << semantics::to_string(p.label) << '\n';
        out << "density = " << fmt(p.point_density) << '\n';
        out << "z = " << fmt(p.z_min) << ' ' << fmt(p.z_max) << '\n';
        if (p.shape == scenario::PrimitiveShape::Disk)
            out << "disk = " << fmt(p.cx) << ' ' << fmt(p.cy) << ' ' << fmt(p.radius) << '\n';
        else
            out << "rect = " << fmt(p.x0) << ' ' << fmt(p.y0) << ' ' << fmt(p.x1) << ' '
                << fmt(p.y1) << '\n';
    }
    write_text_file(path, out.str());
}

}  // namespace travmap::io
