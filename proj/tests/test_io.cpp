#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "sci/io.hpp"
#include "sci/rng.hpp"

using namespace sci;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("scisim-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

DataCube random_cube(int nx, int ny, int nt, uint64_t seed) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DataCube c(nx, ny, nt);
    for (double& v : c.data()) v = u(rng);
    return c;
}

std::vector<char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::vector<char>& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("scit: f64 roundtrip is exact") {
    TempDir tmp;
    const DataCube c = random_cube(5, 7, 3, 1);
    const fs::path p = tmp.path / "cube.scit";
    write_scit(p, c, ScitDtype::F64);
    const DataCube back = read_scit(p);
    CHECK(back.nx() == 5);
    CHECK(back.ny() == 7);
    CHECK(back.nt() == 3);
    CHECK(back.data() == c.data());
}

TEST_CASE("scit: f32 roundtrip within float precision") {
    TempDir tmp;
    const DataCube c = random_cube(4, 4, 2, 2);
    const fs::path p = tmp.path / "cube32.scit";
    write_scit(p, c, ScitDtype::F32);
    const DataCube back = read_scit(p);
    for (size_t i = 0; i < c.size(); ++i)
        CHECK(std::abs(back.data()[i] - c.data()[i]) <= 1e-6);
}

TEST_CASE("scit: header layout is as documented") {
    TempDir tmp;
    const DataCube c(2, 3, 1, 0.5);
    const fs::path p = tmp.path / "h.scit";
    write_scit(p, c, ScitDtype::F64);
    const auto bytes = slurp(p);
    // magic, version, dtype, ndim, then 3 u32 dims and 6 f64 samples
    REQUIRE(bytes.size() == 4 + 1 + 1 + 1 + 3 * 4 + 6 * 8);
    CHECK(bytes[0] == 'S');
    CHECK(bytes[1] == 'C');
    CHECK(bytes[2] == 'I');
    CHECK(bytes[3] == 'T');
    CHECK(bytes[4] == 0x01);  // version
    CHECK(bytes[5] == 0x02);  // f64
    CHECK(bytes[6] == 0x03);  // ndim
    CHECK(static_cast<unsigned char>(bytes[7]) == 2);  // nx LE
    CHECK(static_cast<unsigned char>(bytes[11]) == 3);  // ny LE
}

TEST_CASE("scit: bad magic reported with its byte offset") {
    TempDir tmp;
    const fs::path p = tmp.path / "bad.scit";
    write_scit(p, DataCube(2, 2, 1, 0.1));
    auto bytes = slurp(p);
    bytes[2] = 'X';
    spit(p, bytes);
    try {
        read_scit(p);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("offset 0") != std::string::npos);
        CHECK(msg.find("magic") != std::string::npos);
    }
}

TEST_CASE("scit: unsupported version and dtype rejected") {
    TempDir tmp;
    const fs::path p = tmp.path / "v.scit";
    write_scit(p, DataCube(2, 2, 1, 0.1));
    auto bytes = slurp(p);
    auto original = bytes;

    bytes[4] = 0x07;
    spit(p, bytes);
    try {
        read_scit(p);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("offset 4") != std::string::npos);
    }

    bytes = original;
    bytes[5] = 0x09;
    spit(p, bytes);
    try {
        read_scit(p);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("offset 5") != std::string::npos);
    }
}

TEST_CASE("scit: truncated payload rejected") {
    TempDir tmp;
    const fs::path p = tmp.path / "t.scit";
    write_scit(p, DataCube(2, 2, 2, 0.1));
    auto bytes = slurp(p);
    bytes.resize(bytes.size() - 5);
    spit(p, bytes);
    CHECK_THROWS_AS(read_scit(p), FormatError);
}

TEST_CASE("scit: missing file raises FormatError") {
    CHECK_THROWS_AS(read_scit("/nonexistent/nowhere.scit"), FormatError);
}

TEST_CASE("scit measurement: roundtrip keeps the 2D payload") {
    TempDir tmp;
    Measurement m;
    m.rows = 3;
    m.cols = 4;
    m.mode = Mode::Cacti;
    m.data = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    const fs::path p = tmp.path / "m.scit";
    write_scit_measurement(p, m);
    const Measurement back = read_scit_measurement(p);
    CHECK(back.rows == 3);
    CHECK(back.cols == 4);
    CHECK(back.data == m.data);
}

TEST_CASE("scit measurement: 3D tensor is not a measurement") {
    TempDir tmp;
    const fs::path p = tmp.path / "cube.scit";
    write_scit(p, DataCube(2, 2, 2, 0.1));
    CHECK_THROWS_AS(read_scit_measurement(p), FormatError);
}

TEST_CASE("png frame: quantized roundtrip") {
    TempDir tmp;
    const DataCube c = random_cube(9, 6, 2, 3);
    const fs::path p = tmp.path / "frame.png";
    write_png_frame(p, c, 1);
    const DataCube back = read_png_frame(p);
    CHECK(back.nx() == 9);
    CHECK(back.ny() == 6);
    CHECK(back.nt() == 1);
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 9; ++i) {
            const double expect = std::round(255.0 * c(i, j, 1)) / 255.0;
            CHECK(std::abs(back(i, j, 0) - expect) <= 1e-12);
        }
}

TEST_CASE("png frame: out-of-range values clamp to [0, 1]") {
    TempDir tmp;
    DataCube c(4, 4, 1);
    c(0, 0, 0) = -2.0;
    c(1, 0, 0) = 3.0;
    c(2, 0, 0) = 0.5;
    const fs::path p = tmp.path / "clamp.png";
    write_png_frame(p, c, 0);
    const DataCube back = read_png_frame(p);
    CHECK(back(0, 0, 0) == 0.0);
    CHECK(back(1, 0, 0) == 1.0);
    CHECK(back(2, 0, 0) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("png frame: frame index validated") {
    TempDir tmp;
    const DataCube c(4, 4, 2, 0.5);
    CHECK_THROWS_AS(write_png_frame(tmp.path / "x.png", c, 2), ArgumentError);
    CHECK_THROWS_AS(write_png_frame(tmp.path / "x.png", c, -1), ArgumentError);
}

TEST_CASE("png frame: non-png bytes rejected") {
    TempDir tmp;
    const fs::path p = tmp.path / "fake.png";
    std::ofstream(p) << "this is not a png";
    CHECK_THROWS_AS(read_png_frame(p), FormatError);
}

TEST_CASE("gmm container roundtrip") {
    TempDir tmp;
    auto rng = make_rng(10);
    std::normal_distribution<double> g(0.0, 1.0);
    GmmModel model;
    for (int k = 0; k < 3; ++k) {
        GmmComponent c;
        c.weight = (k + 1) / 6.0;
        c.mean = Eigen::VectorXd::NullaryExpr(5, [&](int) { return g(rng); });
        Eigen::MatrixXd a(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) a(i, j) = g(rng);
        c.cov = a * a.transpose() + Eigen::MatrixXd::Identity(5, 5);
        model.components.push_back(c);
    }
    const fs::path p = tmp.path / "model.gmm";
    write_gmm(p, model);
    const GmmModel back = read_gmm(p);
    REQUIRE(back.components.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(back.components[k].weight == model.components[k].weight);
        CHECK(back.components[k].mean == model.components[k].mean);
        CHECK(back.components[k].cov == model.components[k].cov);
    }
}

TEST_CASE("gmm container rejects a plain tensor file") {
    TempDir tmp;
    const fs::path p = tmp.path / "cube.scit";
    write_scit(p, DataCube(2, 2, 1, 0.1));
    CHECK_THROWS_AS(read_gmm(p), FormatError);
}

TEST_CASE("atomic_write_text leaves no temporary behind") {
    TempDir tmp;
    const fs::path p = tmp.path / "report.txt";
    atomic_write_text(p, "hello\n");
    std::ifstream in(p);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(s == "hello\n");
    size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path)) ++entries;
    CHECK(entries == 1);
    atomic_write_text(p, "second\n");
    std::ifstream in2(p);
    std::string s2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
    CHECK(s2 == "second\n");
}
