#include "skyrm/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace skyrm::io {

namespace {

using nlohmann::json;

json grid_to_json(const GridSpec& g) {
    return {{"nx", g.nx}, {"ny", g.ny}, {"dx", g.dx},
            {"dy", g.dy}, {"cx", g.cx}, {"cy", g.cy}};
}

GridSpec grid_from_json(const json& j) {
    GridSpec g;
    g.nx = j.at("nx").get<int>();
    g.ny = j.at("ny").get<int>();
    g.dx = j.at("dx").get<double>();
    g.dy = j.at("dy").get<double>();
    g.cx = j.value("cx", 0.0);
    g.cy = j.value("cy", 0.0);
    g.validate();
    return g;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return f;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
    std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
    if (!f)
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return f;
}

void format_value(std::ostream& os, double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::general, 17);
    os.write(buf, p - buf);
}

std::vector<std::vector<double>> read_csv_rows(const std::filesystem::path& path) {
    std::ifstream f = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            while (p < end && (*p == ',' || *p == ' ' || *p == '\t')) ++p;
            if (p >= end) break;
            double v = 0.0;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{})
                throw std::runtime_error("malformed number in '" + path.string() + "'");
            row.push_back(v);
            p = next;
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

GridSpec infer_grid(const std::vector<std::vector<double>>& rows, int cols_per_pixel,
                    const std::filesystem::path& path) {
    if (rows.empty())
        throw std::runtime_error("empty CSV file '" + path.string() + "'");
    const std::size_t w = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != w)
            throw std::runtime_error("ragged rows in '" + path.string() + "'");
    if (w % cols_per_pixel != 0)
        throw std::runtime_error("unexpected column count in '" + path.string() + "'");
    GridSpec g;
    g.nx = static_cast<int>(w) / cols_per_pixel;
    g.ny = static_cast<int>(rows.size());
    g.dx = g.dy = 1.0; // placeholder until a sidecar supplies the pitch
    return g;
}

} // namespace

void write_image_csv(const std::filesystem::path& path, const Image& img) {
    std::ofstream f = open_out(path);
    for (int j = 0; j < img.grid.ny; ++j) {
        for (int i = 0; i < img.grid.nx; ++i) {
            if (i) f << ',';
            format_value(f, img.at(i, j));
        }
        f << '\n';
    }
}

Image read_image_csv(const std::filesystem::path& path) {
    const auto rows = read_csv_rows(path);
    GridSpec g = infer_grid(rows, 1, path);
    Image img(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) img.at(i, j) = rows[j][i];
    return img;
}

void write_scalar_field(const std::filesystem::path& csv_path,
                        const ScalarField& field,
                        const std::optional<LGModeSpec>& mode) {
    {
        std::ofstream f = open_out(csv_path);
        for (int j = 0; j < field.grid.ny; ++j) {
            for (int i = 0; i < field.grid.nx; ++i) {
                if (i) f << ',';
                const auto v = field.at(i, j);
                format_value(f, v.real());
                f << ',';
                format_value(f, v.imag());
            }
            f << '\n';
        }
    }
    json meta;
    meta["grid"] = grid_to_json(field.grid);
    if (mode) {
        meta["mode"] = {{"l", mode->l},
                        {"p", mode->p},
                        {"w0", mode->w0},
                        {"wavelength", mode->wavelength},
                        {"z", mode->z}};
    }
    std::filesystem::path sidecar = csv_path;
    sidecar.replace_extension(".json");
    open_out(sidecar) << meta.dump(2) << '\n';
}

ScalarField read_scalar_field(const std::filesystem::path& csv_path) {
    const auto rows = read_csv_rows(csv_path);
    GridSpec g = infer_grid(rows, 2, csv_path);

    std::filesystem::path sidecar = csv_path;
    sidecar.replace_extension(".json");
    if (std::filesystem::exists(sidecar)) {
        json meta = json::parse(open_in(sidecar));
        GridSpec from_meta = grid_from_json(meta.at("grid"));
        if (from_meta.nx != g.nx || from_meta.ny != g.ny)
            throw std::runtime_error("sidecar grid disagrees with CSV shape for '" +
                                     csv_path.string() + "'");
        g = from_meta;
    }
    ScalarField field(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            field.at(i, j) = {rows[j][2 * i], rows[j][2 * i + 1]};
    return field;
}

void write_image_pgm(const std::filesystem::path& path, const Image& img,
                     int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw std::invalid_argument("write_image_pgm: bit_depth must be 8 or 16");
    const unsigned maxval = (1u << bit_depth) - 1;
    std::ofstream f = open_out(path, true);
    f << "P5\n" << img.grid.nx << ' ' << img.grid.ny << '\n' << maxval << '\n';
    for (int j = 0; j < img.grid.ny; ++j) {
        for (int i = 0; i < img.grid.nx; ++i) {
            const double v = img.at(i, j);
            if (v < 0.0 || v > maxval || v != std::floor(v))
                throw std::runtime_error("write_image_pgm: pixel value " +
                                         std::to_string(v) +
                                         " is not an integer in range");
            const auto u = static_cast<std::uint16_t>(v);
            if (bit_depth == 16) {
                // PGM stores 16-bit samples big-endian
                const char bytes[2] = {static_cast<char>(u >> 8),
                                       static_cast<char>(u & 0xff)};
                f.write(bytes, 2);
            } else {
                const char byte = static_cast<char>(u & 0xff);
                f.write(&byte, 1);
            }
        }
    }
}

Image read_image_pgm(const std::filesystem::path& path, int& bit_depth_out) {
    std::ifstream f = open_in(path, true);
    auto next_token = [&]() -> std::string {
        std::string tok;
        int c;
        while ((c = f.get()) != EOF) {
            if (c == '#') {
                while ((c = f.get()) != EOF && c != '\n') {}
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) break;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        return tok;
    };
    if (next_token() != "P5")
        throw std::runtime_error("'" + path.string() + "' is not a binary PGM (P5)");
    GridSpec g;
    g.nx = std::stoi(next_token());
    g.ny = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (maxval == 255) bit_depth_out = 8;
    else if (maxval == 65535) bit_depth_out = 16;
    else
        throw std::runtime_error("unsupported PGM maxval " + std::to_string(maxval) +
                                 " in '" + path.string() + "'");
    g.dx = g.dy = 1.0;
    Image img(g);
    const int bytes = bit_depth_out == 16 ? 2 : 1;
    std::vector<char> buf(static_cast<std::size_t>(g.nx) * bytes);
    for (int j = 0; j < g.ny; ++j) {
        f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!f)
            throw std::runtime_error("truncated PGM data in '" + path.string() + "'");
        for (int i = 0; i < g.nx; ++i) {
            unsigned v;
            if (bytes == 2)
                v = (static_cast<unsigned char>(buf[2 * i]) << 8) |
                    static_cast<unsigned char>(buf[2 * i + 1]);
            else
                v = static_cast<unsigned char>(buf[i]);
            img.at(i, j) = static_cast<double>(v);
        }
    }
    return img;
}

void save_measurement_set(const std::filesystem::path& dir, const MeasurementSet& ms,
                          ImageFormat format) {
    std::filesystem::create_directories(dir);
    const char* ext = format == ImageFormat::Csv ? ".csv" : ".pgm";
    for (Proj p : all_projections) {
        const auto path = dir / (std::string(proj_name(p)) + ext);
        if (format == ImageFormat::Csv) {
            write_image_csv(path, ms.at(p));
        } else {
            if (!ms.bit_depth)
                throw std::runtime_error(
                    "save_measurement_set: PGM output requires a quantized set");
            write_image_pgm(path, ms.at(p), *ms.bit_depth);
        }
    }
    json meta;
    meta["grid"] = grid_to_json(ms.grid);
    if (ms.bit_depth) meta["bit_depth"] = *ms.bit_depth;
    meta["exposure"] = ms.exposure;
    meta["format"] = format == ImageFormat::Csv ? "csv" : "pgm";
    open_out(dir / "meta.json") << meta.dump(2) << '\n';
}

MeasurementSet load_measurement_set(const std::filesystem::path& dir) {
    const auto meta_path = dir / "meta.json";
    if (!std::filesystem::exists(meta_path))
        throw std::runtime_error("missing metadata file '" + meta_path.string() + "'");
    json meta = json::parse(open_in(meta_path));
    MeasurementSet ms;
    ms.grid = grid_from_json(meta.at("grid"));
    if (meta.contains("bit_depth")) ms.bit_depth = meta["bit_depth"].get<int>();
    ms.exposure = meta.value("exposure", "");

    for (Proj p : all_projections) {
        const std::string name = proj_name(p);
        const auto csv = dir / (name + ".csv");
        const auto pgm = dir / (name + ".pgm");
        Image img;
        if (std::filesystem::exists(csv)) {
            img = read_image_csv(csv);
        } else if (std::filesystem::exists(pgm)) {
            int depth = 0;
            img = read_image_pgm(pgm, depth);
            if (ms.bit_depth && depth != *ms.bit_depth)
                throw std::runtime_error("PGM maxval of '" + pgm.string() +
                                         "' disagrees with meta.json bit_depth");
        } else {
            throw std::runtime_error("missing image '" + name + "' in '" +
                                     dir.string() + "'");
        }
        if (img.grid.nx != ms.grid.nx || img.grid.ny != ms.grid.ny)
            throw std::runtime_error("shape mismatch in image '" + name + "'");
        for (double v : img.data)
            if (v < 0.0 || !std::isfinite(v))
                throw std::runtime_error("negative or non-finite value in image '" +
                                         name + "'");
        img.grid = ms.grid;
        ms.at(p) = std::move(img);
    }
    return ms;
}

void write_analysis_result(const std::filesystem::path& path,
                           const AnalysisResult& result) {
    json j;
    j["n_skyrmion"] = result.n_skyrmion;
    j["uncertainty"] = result.uncertainty;
    j["integration_radius"] = result.integration_radius;
    j["center"] = {result.center[0], result.center[1]};
    j["pixel_count"] = result.pixel_count;
    j["coverage"] = result.coverage;
    j["provenance"] = result.provenance;
    open_out(path) << j.dump(2) << '\n';
}

void write_density_csv(const std::filesystem::path& path,
                       const SkyrmionDensityField& sd) {
    write_image_csv(path, sd.sigma_z);
    json meta;
    meta["grid"] = grid_to_json(sd.grid);
    std::filesystem::path sidecar = path;
    sidecar.replace_extension(".json");
    open_out(sidecar) << meta.dump(2) << '\n';
}

} // namespace skyrm::io
