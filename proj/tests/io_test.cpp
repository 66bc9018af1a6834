#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <stdexcept>

#include "doctest.h"

#include "kdn/io.hpp"

using namespace kdn;

namespace {

std::filesystem::path tmp_path(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "kdn_io_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes)
{
    std::ofstream os(p, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const std::filesystem::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

template <typename T>
void append_le(std::string& s, T v)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    s.append(buf, sizeof(T));
}

// KDN1 header for a hand-crafted file.
std::string grid_header(std::uint32_t dim, std::uint64_t side)
{
    std::string s = "KDN1";
    append_le(s, dim);
    append_le(s, side);
    return s;
}

bool same_bits(double a, double b)
{
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// Expect an invalid_argument whose message mentions `needle`.
template <typename Fn>
void check_throws_containing(Fn&& fn, const std::string& needle)
{
    try {
        fn();
        FAIL_CHECK("expected invalid_argument mentioning '" << needle << "', got no throw");
    } catch (const std::invalid_argument& e) {
        CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                      "message was: " << e.what());
    }
}

} // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("grid container round trip is bit-exact, including special values")
{
    ImageGrid g;
    g.dim = 1;
    g.side = 8;
    g.values = {0.0,
                -0.0,
                5e-324, // smallest denormal
                1e300,
                -1.0 / 3.0,
                std::numeric_limits<double>::quiet_NaN(),
                1.0,
                0.1234567890123456789};
    const auto p = tmp_path("roundtrip1d.kdn");
    write_grid(p.string(), g);
    const ImageGrid back = read_grid(p.string());
    REQUIRE(back.dim == 1);
    REQUIRE(back.side == 8);
    REQUIRE(back.values.size() == 8);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(same_bits(back.values[i], g.values[i]));

    ImageGrid g2;
    g2.dim = 2;
    g2.side = 5;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int i = 0; i < 25; ++i)
        g2.values.push_back(uni(rng));
    const auto p2 = tmp_path("roundtrip2d.kdn");
    write_grid(p2.string(), g2);
    const ImageGrid back2 = read_grid(p2.string());
    REQUIRE(back2.dim == 2);
    REQUIRE(back2.side == 5);
    for (std::size_t i = 0; i < 25; ++i)
        CHECK(same_bits(back2.values[i], g2.values[i]));
}

TEST_CASE("grid container rejects malformed files")
{
    check_throws_containing([] { read_grid("/nonexistent/kdn/file.kdn"); }, "cannot open");

    const auto bad_magic = tmp_path("bad_magic.kdn");
    write_bytes(bad_magic, "JUNKxxxxxxxxxxxxxxxx");
    check_throws_containing([&] { read_grid(bad_magic.string()); }, "bad magic");

    const auto short_header = tmp_path("short_header.kdn");
    write_bytes(short_header, "KDN1\x01\x00");
    check_throws_containing([&] { read_grid(short_header.string()); }, "truncated");

    const auto bad_dim = tmp_path("bad_dim.kdn");
    write_bytes(bad_dim, grid_header(5, 4));
    check_throws_containing([&] { read_grid(bad_dim.string()); }, "out of range");

    const auto zero_side = tmp_path("zero_side.kdn");
    write_bytes(zero_side, grid_header(1, 0));
    check_throws_containing([&] { read_grid(zero_side.string()); }, "out of range");

    const auto huge_side = tmp_path("huge_side.kdn");
    write_bytes(huge_side, grid_header(1, (1u << 20) + 1));
    check_throws_containing([&] { read_grid(huge_side.string()); }, "out of range");

    std::string truncated = grid_header(1, 4);
    append_le(truncated, 0.5);
    append_le(truncated, 0.25); // two of four doubles
    const auto trunc_path = tmp_path("truncated.kdn");
    write_bytes(trunc_path, truncated);
    check_throws_containing([&] { read_grid(trunc_path.string()); }, "truncated payload");

    std::string trailing = grid_header(1, 2);
    append_le(trailing, 0.5);
    append_le(trailing, 0.25);
    trailing.push_back('\0');
    const auto trail_path = tmp_path("trailing.kdn");
    write_bytes(trail_path, trailing);
    check_throws_containing([&] { read_grid(trail_path.string()); }, "trailing bytes");
}

TEST_CASE("mask round trip and validation")
{
    const std::vector<std::uint8_t> mask{1, 0, 0, 1, 1, 1, 0, 0, 1};
    const auto p = tmp_path("mask.kdn");
    write_mask(p.string(), mask, 2, 3);
    const MaskData back = read_mask(p.string());
    CHECK(back.dim == 2);
    CHECK(back.side == 3);
    CHECK(back.mask == mask);

    const std::vector<std::uint8_t> bad{1, 2, 0, 1};
    check_throws_containing([&] { write_mask(tmp_path("bad.kdn").string(), bad, 1, 4); },
                            "0 or 1");
    // Length must match side^dim (caught by the shared shape validation).
    CHECK_THROWS_AS(write_mask(tmp_path("short.kdn").string(),
                               std::vector<std::uint8_t>{1, 0, 1}, 1, 4),
                    std::invalid_argument);

    // A grid holding 0.5 is not a mask.
    ImageGrid g;
    g.dim = 1;
    g.side = 4;
    g.values = {0.0, 0.5, 1.0, 1.0};
    const auto notmask = tmp_path("notmask.kdn");
    write_grid(notmask.string(), g);
    check_throws_containing([&] { read_mask(notmask.string()); }, "other than 0/1");
}

TEST_CASE("metadata sidecar round trip")
{
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"class", "cartoon"},
        {"sigma255", "20"},
        {"formula", "y=a+b"}, // '=' allowed inside values
        {"empty", ""},
    };
    const auto p = tmp_path("meta.txt");
    write_meta(p.string(), pairs);
    const auto back = read_meta(p.string());
    REQUIRE(back.size() == 4);
    CHECK(back.at("class") == "cartoon");
    CHECK(back.at("sigma255") == "20");
    CHECK(back.at("formula") == "y=a+b");
    CHECK(back.at("empty") == "");

    check_throws_containing(
        [&] { write_meta(p.string(), {{"bad=key", "v"}}); }, "without '='");
    CHECK_THROWS_AS(write_meta(p.string(), {{"", "v"}}), std::invalid_argument);
    CHECK_THROWS_AS(write_meta(p.string(), {{"k", "two\nlines"}}), std::invalid_argument);

    const auto loose = tmp_path("meta_loose.txt");
    write_bytes(loose, "\n\na=b\n\n");
    const auto m = read_meta(loose.string());
    REQUIRE(m.size() == 1); // blank lines are skipped
    CHECK(m.at("a") == "b");

    const auto noeq = tmp_path("meta_noeq.txt");
    write_bytes(noeq, "justtext\n");
    check_throws_containing([&] { read_meta(noeq.string()); }, "key=value");
}

TEST_CASE("PGM export writes exact bytes with round-half-to-even quantization")
{
    ImageGrid g;
    g.dim = 1;
    g.side = 3;
    g.values = {0.5, 126.5 / 255.0, 1.0};
    const auto p = tmp_path("quant.pgm");
    write_pgm(p.string(), g);
    const std::string bytes = read_bytes(p.string());
    // 255*0.5 = 127.5 rounds to the even 128; 126.5 rounds to the even 126.
    std::string expect = "P5\n3 1\n255\n";
    expect.push_back(static_cast<char>(128));
    expect.push_back(static_cast<char>(126));
    expect.push_back(static_cast<char>(255));
    CHECK(bytes == expect);

    ImageGrid clipped;
    clipped.dim = 1;
    clipped.side = 2;
    clipped.values = {-0.2, 1.3};
    const auto pc = tmp_path("clip.pgm");
    write_pgm(pc.string(), clipped);
    const std::string cb = read_bytes(pc.string());
    REQUIRE(cb.size() == 11 + 2);
    CHECK(static_cast<unsigned char>(cb[11]) == 0);
    CHECK(static_cast<unsigned char>(cb[12]) == 255);

    ImageGrid g3;
    g3.dim = 3;
    g3.side = 2;
    g3.values.assign(8, 0.5);
    CHECK_THROWS_AS(write_pgm(tmp_path("bad.pgm").string(), g3), std::invalid_argument);
}

TEST_CASE("PGM round trip: exact on byte-representable values, bounded otherwise")
{
    ImageGrid g;
    g.dim = 2;
    g.side = 16;
    for (int k = 0; k < 256; ++k)
        g.values.push_back(static_cast<double>(k) / 255.0);
    const auto p = tmp_path("bytes.pgm");
    write_pgm(p.string(), g);
    const ImageGrid back = read_pgm(p.string());
    REQUIRE(back.dim == 2);
    REQUIRE(back.side == 16);
    for (int k = 0; k < 256; ++k)
        CHECK(back.values[k] == g.values[k]); // k/255 -> byte k -> k/255

    ImageGrid noisy;
    noisy.dim = 1;
    noisy.side = 101;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 101; ++i)
        noisy.values.push_back(uni(rng));
    const auto pn = tmp_path("noisy.pgm");
    write_pgm(pn.string(), noisy);
    const ImageGrid nb = read_pgm(pn.string());
    REQUIRE(nb.dim == 1);
    REQUIRE(nb.side == 101);
    for (int i = 0; i < 101; ++i)
        CHECK(std::abs(nb.values[i] - noisy.values[i]) <= 0.5 / 255.0 + 1e-9);
}

TEST_CASE("PGM import rejects unsupported or malformed files")
{
    const auto p2 = tmp_path("ascii.pgm");
    write_bytes(p2, "P2\n2 2\n255\n0 1 2 3\n");
    check_throws_containing([&] { read_pgm(p2.string()); }, "ASCII PGM (P2) is not supported");

    const auto p6 = tmp_path("color.pgm");
    write_bytes(p6, "P6\n2 2\n255\n______________");
    check_throws_containing([&] { read_pgm(p6.string()); }, "not a binary PGM");

    const auto badmax = tmp_path("badmax.pgm");
    write_bytes(badmax, std::string("P5\n2 2\n100\n") + std::string(4, '\x10'));
    check_throws_containing([&] { read_pgm(badmax.string()); }, "maxval 255");

    const auto rect = tmp_path("rect.pgm");
    write_bytes(rect, std::string("P5\n3 2\n255\n") + std::string(6, '\x10'));
    check_throws_containing([&] { read_pgm(rect.string()); }, "square");

    const auto shortraster = tmp_path("shortraster.pgm");
    write_bytes(shortraster, std::string("P5\n2 2\n255\n") + std::string(2, '\x10'));
    check_throws_containing([&] { read_pgm(shortraster.string()); }, "truncated PGM raster");

    const auto badwidth = tmp_path("badwidth.pgm");
    write_bytes(badwidth, "P5\nabc 2\n255\nxxxx");
    check_throws_containing([&] { read_pgm(badwidth.string()); }, "malformed");

    const auto empty = tmp_path("empty.pgm");
    write_bytes(empty, "");
    check_throws_containing([&] { read_pgm(empty.string()); }, "truncated PGM header");
}

TEST_CASE("PGM header comments are skipped")
{
    std::string data = "P5\n# full line comment\n2 # trailing comment\n2\n255\n";
    data.push_back(static_cast<char>(10));
    data.push_back(static_cast<char>(20));
    data.push_back(static_cast<char>(30));
    data.push_back(static_cast<char>(40));
    const auto p = tmp_path("comments.pgm");
    write_bytes(p, data);
    const ImageGrid g = read_pgm(p.string());
    REQUIRE(g.dim == 2);
    REQUIRE(g.side == 2);
    CHECK(g.values[0] == 10.0 / 255.0);
    CHECK(g.values[3] == 40.0 / 255.0);
}

TEST_CASE("CSV quoting follows RFC 4180 conventions")
{
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("") == "");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
    CHECK(csv_field("cr\rhere") == "\"cr\rhere\"");

    std::ostringstream os;
    const std::vector<std::string> cells{"a", "b,c", "d\"e"};
    write_csv_row(os, cells);
    CHECK(os.str() == "a,\"b,c\",\"d\"\"e\"\n");
}

TEST_CASE("numeric CSV cells use shortest round-trip formatting")
{
    CHECK(csv_num(0.0) == "0");
    CHECK(csv_num(42.0) == "42");
    CHECK(csv_num(1.5) == "1.5");
    CHECK(csv_num(0.1) == "0.1");
    CHECK(csv_num(20.25) == "20.25");
    CHECK(csv_num(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(csv_num(-std::numeric_limits<double>::infinity()) == "-inf");
    // Shortest form must parse back to the identical double.
    for (double v : {1.0 / 3.0, 2.5e-7, 9.87654321e12, -0.3}) {
        const std::string s = csv_num(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_SUITE_END();
