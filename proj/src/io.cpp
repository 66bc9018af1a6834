#include "kdn/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kdn/require.hpp"

static_assert(std::endian::native == std::endian::little,
              "grid container I/O assumes a little-endian host");

namespace kdn {

namespace {

constexpr char kMagic[4] = {'K', 'D', 'N', '1'};

template <typename T>
void write_le(std::ostream& os, T v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& is, const std::string& path, const char* what)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    KDN_REQUIRE(is.good(), path << ": truncated file while reading " << what);
    return v;
}

} // namespace

void write_grid(const std::string& path, const ImageGrid& g)
{
    validate_shape(g);
    std::ofstream os(path, std::ios::binary);
    KDN_REQUIRE(os, "cannot open '" << path << "' for writing");
    os.write(kMagic, sizeof(kMagic));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim));
    write_le<std::uint64_t>(os, static_cast<std::uint64_t>(g.side));
    os.write(reinterpret_cast<const char*>(g.values.data()),
             static_cast<std::streamsize>(g.values.size() * sizeof(double)));
    KDN_REQUIRE(os.good(), "write failed for '" << path << "'");
}

ImageGrid read_grid(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    KDN_REQUIRE(is, "cannot open '" << path << "' for reading");
    char magic[4];
    is.read(magic, sizeof(magic));
    KDN_REQUIRE(is.good() && std::memcmp(magic, kMagic, 4) == 0,
                path << ": not a KDN1 grid file (bad magic)");
    const auto dim = read_le<std::uint32_t>(is, path, "dimension");
    const auto side = read_le<std::uint64_t>(is, path, "side length");
    KDN_REQUIRE(dim >= 1 && dim <= static_cast<std::uint32_t>(kMaxDim),
                path << ": dimension " << dim << " out of range [1," << kMaxDim << "]");
    KDN_REQUIRE(side >= 1 && side <= 1u << 20, path << ": side length " << side << " out of range");

    ImageGrid g;
    g.dim = static_cast<int>(dim);
    g.side = static_cast<int>(side);
    g.values.resize(grid_size(g.dim, g.side));
    is.read(reinterpret_cast<char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(double)));
    KDN_REQUIRE(is.good(), path << ": truncated payload (expected " << g.values.size()
                                << " doubles)");
    is.peek();
    KDN_REQUIRE(is.eof(), path << ": trailing bytes after payload");
    return g;
}

void write_mask(const std::string& path, std::span<const std::uint8_t> mask, int dim, int side)
{
    ImageGrid g;
    g.dim = dim;
    g.side = side;
    g.values.reserve(mask.size());
    for (std::uint8_t m : mask) {
        KDN_REQUIRE(m == 0 || m == 1, "mask entries must be 0 or 1");
        g.values.push_back(m ? 1.0 : 0.0);
    }
    write_grid(path, g);
}

MaskData read_mask(const std::string& path)
{
    const ImageGrid g = read_grid(path);
    MaskData out;
    out.dim = g.dim;
    out.side = g.side;
    out.mask.reserve(g.values.size());
    for (double v : g.values) {
        KDN_REQUIRE(v == 0.0 || v == 1.0,
                    path << ": mask file carries a value other than 0/1");
        out.mask.push_back(v == 1.0 ? 1 : 0);
    }
    return out;
}

void write_meta(const std::string& path,
                const std::vector<std::pair<std::string, std::string>>& pairs)
{
    std::ofstream os(path);
    KDN_REQUIRE(os, "cannot open '" << path << "' for writing");
    for (const auto& [key, value] : pairs) {
        KDN_REQUIRE(!key.empty() && key.find('=') == std::string::npos &&
                        key.find('\n') == std::string::npos,
                    "metadata key '" << key << "' must be non-empty without '=' or newline");
        KDN_REQUIRE(value.find('\n') == std::string::npos,
                    "metadata value for '" << key << "' must be single-line");
        os << key << '=' << value << '\n';
    }
    KDN_REQUIRE(os.good(), "write failed for '" << path << "'");
}

std::map<std::string, std::string> read_meta(const std::string& path)
{
    std::ifstream is(path);
    KDN_REQUIRE(is, "cannot open '" << path << "' for reading");
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        KDN_REQUIRE(eq != std::string::npos && eq > 0,
                    path << ": metadata line without key=value form: '" << line << "'");
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

void write_pgm(const std::string& path, const ImageGrid& g)
{
    validate_shape(g);
    KDN_REQUIRE(g.dim == 1 || g.dim == 2,
                "PGM export supports 1-D and 2-D grids, got dimension " << g.dim);
    const int width = g.side;
    const int height = g.dim == 2 ? g.side : 1;

    std::ofstream os(path, std::ios::binary);
    KDN_REQUIRE(os, "cannot open '" << path << "' for writing");
    os << "P5\n" << width << ' ' << height << "\n255\n";
    std::vector<unsigned char> row(g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        // std::nearbyint under the default rounding mode is round-half-even.
        double q = std::nearbyint(255.0 * g.values[i]);
        q = q < 0.0 ? 0.0 : (q > 255.0 ? 255.0 : q);
        row[i] = static_cast<unsigned char>(q);
    }
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size()));
    KDN_REQUIRE(os.good(), "write failed for '" << path << "'");
}

namespace {

// Next whitespace-delimited header token, skipping '#' comment lines.
std::string pgm_token(std::istream& is, const std::string& path)
{
    int c = is.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n')
                c = is.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = is.get();
    }
    KDN_REQUIRE(c != EOF, path << ": truncated PGM header");
    std::string tok;
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = is.get();
    }
    return tok;
}

int pgm_int(std::istream& is, const std::string& path, const char* what)
{
    const std::string tok = pgm_token(is, path);
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    KDN_REQUIRE(res.ec == std::errc{} && res.ptr == tok.data() + tok.size(),
                path << ": malformed PGM " << what << " '" << tok << "'");
    return v;
}

} // namespace

ImageGrid read_pgm(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    KDN_REQUIRE(is, "cannot open '" << path << "' for reading");
    const std::string magic = pgm_token(is, path);
    KDN_REQUIRE(magic != "P2", path << ": ASCII PGM (P2) is not supported, only binary P5");
    KDN_REQUIRE(magic == "P5", path << ": not a binary PGM file (magic '" << magic << "')");
    const int width = pgm_int(is, path, "width");
    const int height = pgm_int(is, path, "height");
    const int maxval = pgm_int(is, path, "maxval");
    KDN_REQUIRE(width >= 1 && height >= 1, path << ": bad PGM size " << width << "x" << height);
    KDN_REQUIRE(maxval == 255, path << ": only maxval 255 is supported, got " << maxval);
    KDN_REQUIRE(height == 1 || width == height,
                path << ": only square (or single-row) PGM images map onto grids, got "
                     << width << "x" << height);
    // The header token reader already consumed the single whitespace byte
    // that separates the maxval from the raster.
    ImageGrid g;
    g.dim = height == 1 ? 1 : 2;
    g.side = width;
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    KDN_REQUIRE(is.gcount() == static_cast<std::streamsize>(raw.size()),
                path << ": truncated PGM raster");
    g.values.reserve(raw.size());
    for (unsigned char p : raw)
        g.values.push_back(static_cast<double>(p) / 255.0);
    return g;
}

std::string csv_field(const std::string& value)
{
    if (value.find_first_of(",\"\r\n") == std::string::npos)
        return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv_row(std::ostream& os, std::span<const std::string> cells)
{
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k)
            os << ',';
        os << csv_field(cells[k]);
    }
    os << '\n';
}

std::string csv_num(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace kdn
