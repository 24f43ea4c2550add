#include "sci/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace sci {

namespace {

void put_u32(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f64(std::string& out, double v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.append(buf, 8);
}

void put_f32(std::string& out, float v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.append(buf, 4);
}

struct Reader {
    std::vector<char> bytes;
    size_t pos = 0;
    std::string name;

    explicit Reader(const std::filesystem::path& path) : name(path.string()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw FormatError(name + ": cannot open");
        bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    void need(size_t n, const char* what) {
        if (pos + n > bytes.size())
            throw FormatError(name + ": truncated " + what + " at byte offset " + std::to_string(pos));
    }
    uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<uint8_t>(bytes[pos++]);
    }
    uint32_t u32(const char* what) {
        need(4, what);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    double f64(const char* what) {
        need(8, what);
        double v;
        std::memcpy(&v, bytes.data() + pos, 8);
        pos += 8;
        return v;
    }
    float f32(const char* what) {
        need(4, what);
        float v;
        std::memcpy(&v, bytes.data() + pos, 4);
        pos += 4;
        return v;
    }
};

void check_magic(Reader& r) {
    r.need(4, "magic");
    if (std::memcmp(r.bytes.data(), "SCIT", 4) != 0)
        throw FormatError(r.name + ": bad magic at byte offset 0");
    r.pos = 4;
    const uint8_t version = r.u8("version");
    if (version != 0x01)
        throw FormatError(r.name + ": unsupported version at byte offset 4");
}

void write_binary_atomic(const std::filesystem::path& path, const std::string& payload) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError(tmp.string() + ": cannot open for writing");
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!out) throw FormatError(tmp.string() + ": write failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string scit_payload(const std::vector<double>& data, const std::vector<uint32_t>& dims,
                         ScitDtype dtype) {
    std::string out = "SCIT";
    out.push_back(0x01);
    out.push_back(static_cast<char>(dtype));
    out.push_back(static_cast<char>(dims.size()));
    for (uint32_t d : dims) put_u32(out, d);
    if (dtype == ScitDtype::F64)
        for (double v : data) put_f64(out, v);
    else
        for (double v : data) put_f32(out, static_cast<float>(v));
    return out;
}

std::pair<std::vector<uint32_t>, std::vector<double>> read_scit_raw(const std::filesystem::path& path) {
    Reader r(path);
    check_magic(r);
    const uint8_t dtype = r.u8("dtype");
    if (dtype != 0x01 && dtype != 0x02)
        throw FormatError(r.name + ": unknown dtype at byte offset 5");
    const uint8_t ndim = r.u8("ndim");
    std::vector<uint32_t> dims(ndim);
    size_t total = 1;
    for (int i = 0; i < ndim; ++i) {
        dims[i] = r.u32("dims");
        total *= dims[i];
    }
    std::vector<double> data(total);
    for (size_t i = 0; i < total; ++i)
        data[i] = dtype == 0x02 ? r.f64("payload") : static_cast<double>(r.f32("payload"));
    return {dims, data};
}

}  // namespace

void write_scit(const std::filesystem::path& path, const DataCube& cube, ScitDtype dtype) {
    write_binary_atomic(path, scit_payload(cube.data(),
                                           {static_cast<uint32_t>(cube.nx()), static_cast<uint32_t>(cube.ny()),
                                            static_cast<uint32_t>(cube.nt())},
                                           dtype));
}

DataCube read_scit(const std::filesystem::path& path) {
    auto [dims, data] = read_scit_raw(path);
    if (dims.size() == 2)
        return DataCube(static_cast<int>(dims[0]), static_cast<int>(dims[1]), 1, std::move(data));
    if (dims.size() != 3)
        throw FormatError(path.string() + ": expected 2 or 3 dims");
    return DataCube(static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]),
                    std::move(data));
}

void write_scit_measurement(const std::filesystem::path& path, const Measurement& m, ScitDtype dtype) {
    write_binary_atomic(path, scit_payload(m.data,
                                           {static_cast<uint32_t>(m.rows), static_cast<uint32_t>(m.cols)},
                                           dtype));
}

Measurement read_scit_measurement(const std::filesystem::path& path) {
    auto [dims, data] = read_scit_raw(path);
    if (dims.size() != 2)
        throw FormatError(path.string() + ": measurement must have 2 dims");
    Measurement m;
    m.rows = static_cast<int>(dims[0]);
    m.cols = static_cast<int>(dims[1]);
    m.data = std::move(data);
    return m;
}

void write_png_frame(const std::filesystem::path& path, const DataCube& cube, int frame) {
    if (frame < 0 || frame >= cube.nt())
        throw ArgumentError("write_png_frame: frame index out of range");
    const int nx = cube.nx(), ny = cube.ny();
    std::vector<png_byte> row(ny);

    const std::filesystem::path tmp = path.string() + ".tmp";
    FILE* fp = std::fopen(tmp.c_str(), "wb");
    if (!fp) throw FormatError(tmp.string() + ": cannot open for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw FormatError(tmp.string() + ": libpng write error");
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, ny, nx, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double v = std::clamp(cube(i, j, frame), 0.0, 1.0);
            row[j] = static_cast<png_byte>(std::lround(255.0 * v));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    std::filesystem::rename(tmp, path);
}

DataCube read_png_frame(const std::filesystem::path& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw FormatError(path.string() + ": cannot open");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw FormatError(path.string() + ": libpng read error");
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(png, 1, -1, -1);
    png_read_update_info(png, info);
    const int nx = static_cast<int>(png_get_image_height(png, info));
    const int ny = static_cast<int>(png_get_image_width(png, info));
    DataCube cube(nx, ny, 1);
    std::vector<png_byte> row(ny);
    for (int i = 0; i < nx; ++i) {
        png_read_row(png, row.data(), nullptr);
        for (int j = 0; j < ny; ++j) cube(i, j, 0) = row[j] / 255.0;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return cube;
}

void write_gmm(const std::filesystem::path& path, const GmmModel& model) {
    std::string out = "SCIT";
    out.push_back(0x01);
    out.push_back(0x10);  // container kind: GMM
    put_u32(out, static_cast<uint32_t>(model.components.size()));
    put_u32(out, static_cast<uint32_t>(model.dim()));
    const int d = model.dim();
    for (const auto& c : model.components) {
        put_f64(out, c.weight);
        for (int i = 0; i < d; ++i) put_f64(out, c.mean(i));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) put_f64(out, c.cov(i, j));
    }
    write_binary_atomic(path, out);
}

GmmModel read_gmm(const std::filesystem::path& path) {
    Reader r(path);
    check_magic(r);
    const uint8_t kind = r.u8("kind");
    if (kind != 0x10)
        throw FormatError(r.name + ": not a GMM container (kind byte at offset 5)");
    const uint32_t K = r.u32("component count");
    const uint32_t d = r.u32("dimension");
    GmmModel model;
    model.components.resize(K);
    for (uint32_t k = 0; k < K; ++k) {
        auto& c = model.components[k];
        c.weight = r.f64("weight");
        c.mean.resize(d);
        for (uint32_t i = 0; i < d; ++i) c.mean(i) = r.f64("mean");
        c.cov.resize(d, d);
        for (uint32_t i = 0; i < d; ++i)
            for (uint32_t j = 0; j < d; ++j) c.cov(i, j) = r.f64("covariance");
    }
    return model;
}

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
    write_binary_atomic(path, text);
}

}  // namespace sci
