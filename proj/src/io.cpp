#include "hologen/io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "hologen/numfmt.hpp"

namespace hologen {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::vector<uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (in.bad()) fail("read error: " + path);
    return bytes;
}

void write_binary_file(const std::string& path, const uint8_t* data, size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot create file: " + path);
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) fail("write error: " + path);
}

double rec709(double r, double g, double b) {
    return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

bool is_png(const std::vector<uint8_t>& b) {
    static constexpr uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    return b.size() >= 8 && std::memcmp(b.data(), sig, 8) == 0;
}

bool is_bmp(const std::vector<uint8_t>& b) {
    return b.size() >= 2 && b[0] == 'B' && b[1] == 'M';
}

RealImage decode_png_gray(const std::vector<uint8_t>& bytes, const std::string& path) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
        fail("png decode failed (" + path + "): " + img.message);
    if (img.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&img);
        fail("unsupported bit depth (16-bit PNG): " + path);
    }
    if (img.width == 0 || img.height == 0) {
        png_image_free(&img);
        fail("zero-size image: " + path);
    }
    img.format = PNG_FORMAT_RGBA;
    std::vector<uint8_t> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        std::string msg(img.message);
        png_image_free(&img);
        fail("png decode failed (" + path + "): " + msg);
    }
    int w = static_cast<int>(img.width), h = static_cast<int>(img.height);
    RealImage out(w, h);
    for (size_t i = 0, n = static_cast<size_t>(w) * h; i < n; ++i) {
        const uint8_t* px = buf.data() + 4 * i;
        out.data[i] = rec709(px[0], px[1], px[2]) / 255.0;
    }
    return out;
}

uint16_t rd16(const std::vector<uint8_t>& b, size_t off) {
    return static_cast<uint16_t>(b[off] | (b[off + 1] << 8));
}

uint32_t rd32(const std::vector<uint8_t>& b, size_t off) {
    return static_cast<uint32_t>(b[off]) | (static_cast<uint32_t>(b[off + 1]) << 8) |
           (static_cast<uint32_t>(b[off + 2]) << 16) |
           (static_cast<uint32_t>(b[off + 3]) << 24);
}

RealImage decode_bmp_gray(const std::vector<uint8_t>& b, const std::string& path) {
    if (b.size() < 54) fail("truncated BMP: " + path);
    uint32_t data_offset = rd32(b, 10);
    uint32_t hdr_size = rd32(b, 14);
    if (hdr_size < 40) fail("unsupported BMP header: " + path);
    int32_t width = static_cast<int32_t>(rd32(b, 18));
    int32_t raw_height = static_cast<int32_t>(rd32(b, 22));
    uint16_t bpp = rd16(b, 28);
    uint32_t compression = rd32(b, 30);
    if (compression != 0) fail("compressed BMP unsupported: " + path);
    bool top_down = raw_height < 0;
    int height = top_down ? -raw_height : raw_height;
    if (width <= 0 || height == 0) fail("zero-size image: " + path);
    if (bpp != 8 && bpp != 24 && bpp != 32)
        fail("unsupported bit depth (" + std::to_string(bpp) + "-bit BMP): " + path);

    const uint8_t* palette = nullptr;
    uint32_t palette_count = 0;
    if (bpp == 8) {
        palette_count = rd32(b, 46);
        if (palette_count == 0) palette_count = 256;
        size_t pal_off = 14 + hdr_size;
        if (pal_off + 4ull * palette_count > b.size()) fail("truncated BMP palette: " + path);
        palette = b.data() + pal_off;
    }

    size_t bytes_per_px = bpp / 8;
    size_t stride = (static_cast<size_t>(width) * bytes_per_px + 3) & ~size_t(3);
    if (data_offset + stride * height > b.size()) fail("truncated BMP pixel data: " + path);

    RealImage out(width, height);
    for (int y = 0; y < height; ++y) {
        int src_row = top_down ? y : height - 1 - y;
        const uint8_t* row = b.data() + data_offset + stride * src_row;
        for (int x = 0; x < width; ++x) {
            const uint8_t* px = row + bytes_per_px * x;
            double v;
            if (bpp == 8) {
                if (px[0] >= palette_count) fail("BMP palette index out of range: " + path);
                const uint8_t* pe = palette + 4 * px[0]; // BGRA entries
                v = rec709(pe[2], pe[1], pe[0]);
            } else {
                v = rec709(px[2], px[1], px[0]); // BGR order
            }
            out.at(x, y) = v / 255.0;
        }
    }
    return out;
}

void put_u32le(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

void put_f32le(std::vector<uint8_t>& out, float v) {
    put_u32le(out, std::bit_cast<uint32_t>(v));
}

void put_f64le(std::vector<uint8_t>& out, double v) {
    uint64_t u = std::bit_cast<uint64_t>(v);
    put_u32le(out, static_cast<uint32_t>(u));
    put_u32le(out, static_cast<uint32_t>(u >> 32));
}

float get_f32le(const uint8_t* p) {
    uint32_t u = static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
                 (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(u);
}

double get_f64le(const uint8_t* p) {
    uint64_t lo = static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
                  (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
    uint64_t hi = static_cast<uint32_t>(p[4]) | (static_cast<uint32_t>(p[5]) << 8) |
                  (static_cast<uint32_t>(p[6]) << 16) | (static_cast<uint32_t>(p[7]) << 24);
    return std::bit_cast<double>(lo | (hi << 32));
}

template <typename T>
void write_field_dump_impl(const std::string& path, const ComplexField<T>& f) {
    require_finite(f, "field dump");
    std::vector<uint8_t> out;
    out.reserve(13 + f.data.size() * 2 * sizeof(T));
    out.insert(out.end(), {'H', 'G', 'F', '1'});
    put_u32le(out, static_cast<uint32_t>(f.nx));
    put_u32le(out, static_cast<uint32_t>(f.ny));
    out.push_back(static_cast<uint8_t>(sizeof(T)));
    for (const std::complex<T>& z : f.data) {
        if constexpr (sizeof(T) == 4) {
            put_f32le(out, static_cast<float>(z.real()));
            put_f32le(out, static_cast<float>(z.imag()));
        } else {
            put_f64le(out, static_cast<double>(z.real()));
            put_f64le(out, static_cast<double>(z.imag()));
        }
    }
    write_binary_file(path, out.data(), out.size());
}

template <typename T>
void write_replay_png_impl(const std::string& path, const ComplexField<T>& replay) {
    require_finite(replay, "replay image");
    size_t n = replay.data.size();
    std::vector<double> amp(n);
    double peak = 0.0;
    for (size_t i = 0; i < n; ++i) {
        amp[i] = std::abs(std::complex<double>(replay.data[i].real(), replay.data[i].imag()));
        peak = std::max(peak, amp[i]);
    }
    std::vector<uint8_t> px(n, 0);
    if (peak > 0.0) {
        double s = 255.0 / peak;
        for (size_t i = 0; i < n; ++i) {
            long g = std::lround(amp[i] * s);
            px[i] = static_cast<uint8_t>(g < 0 ? 0 : g > 255 ? 255 : g);
        }
    }
    write_png_gray(path, px, replay.nx, replay.ny);
    write_text_file(path + ".scale.txt",
                    "amplitude_at_255=" + detail::format_double(peak) + "\n");
}

} // namespace

RealImage read_image_gray(const std::string& path) {
    std::vector<uint8_t> bytes = read_binary_file(path);
    if (is_png(bytes)) return decode_png_gray(bytes, path);
    if (is_bmp(bytes)) return decode_bmp_gray(bytes, path);
    fail("unrecognized image format (expected PNG or BMP): " + path);
}

RealImage load_target(const std::string& path, Normalization normalize) {
    RealImage img = read_image_gray(path);
    normalize_image(img, normalize);
    return img;
}

RegionMask load_mask(const std::string& path) {
    RealImage img = read_image_gray(path);
    RegionMask mask(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i)
        mask.data[i] = img.data[i] > 0.5 ? 1 : 0;
    return mask;
}

void write_png_gray(const std::string& path, const std::vector<uint8_t>& pixels, int width,
                    int height) {
    if (width < 1 || height < 1 || pixels.size() != static_cast<size_t>(width) * height)
        throw std::invalid_argument("write_png_gray: pixel buffer does not match dimensions");
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(width);
    img.height = static_cast<png_uint_32>(height);
    img.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.c_str(), 0, pixels.data(), 0, nullptr)) {
        std::string msg(img.message);
        png_image_free(&img);
        fail("png encode failed (" + path + "): " + msg);
    }
}

std::vector<uint8_t> read_png_gray8(const std::string& path, int* width, int* height) {
    std::vector<uint8_t> bytes = read_binary_file(path);
    if (!is_png(bytes)) fail("not a PNG file: " + path);
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
        fail("png decode failed (" + path + "): " + img.message);
    img.format = PNG_FORMAT_GRAY;
    std::vector<uint8_t> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        std::string msg(img.message);
        png_image_free(&img);
        fail("png decode failed (" + path + "): " + msg);
    }
    *width = static_cast<int>(img.width);
    *height = static_cast<int>(img.height);
    return buf;
}

void write_hologram_png(const std::string& path, const std::vector<int32_t>& levels, int width,
                        int height, int level_count) {
    if (level_count < 2 || level_count > 256)
        throw std::invalid_argument(
            "write_hologram_png: level count must be in [2, 256] for a lossless 8-bit encoding");
    if (width < 1 || height < 1 || levels.size() != static_cast<size_t>(width) * height)
        throw std::invalid_argument("write_hologram_png: level buffer does not match dimensions");
    std::vector<uint8_t> px(levels.size());
    for (size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 0 || levels[i] >= level_count)
            throw std::invalid_argument("write_hologram_png: level index out of range");
        px[i] = static_cast<uint8_t>(
            std::lround(255.0 * levels[i] / (level_count - 1)));
    }
    write_png_gray(path, px, width, height);
}

std::vector<int32_t> read_hologram_png(const std::string& path, int level_count, int* width,
                                       int* height) {
    if (level_count < 2 || level_count > 256)
        throw std::invalid_argument("read_hologram_png: level count must be in [2, 256]");
    std::vector<uint8_t> px = read_png_gray8(path, width, height);
    std::vector<int32_t> levels(px.size());
    for (size_t i = 0; i < px.size(); ++i)
        levels[i] = static_cast<int32_t>(std::lround(px[i] * (level_count - 1) / 255.0));
    return levels;
}

void write_replay_png(const std::string& path, const ComplexField<float>& replay) {
    write_replay_png_impl(path, replay);
}

void write_replay_png(const std::string& path, const ComplexField<double>& replay) {
    write_replay_png_impl(path, replay);
}

void write_field_dump(const std::string& path, const ComplexField<float>& f) {
    write_field_dump_impl(path, f);
}

void write_field_dump(const std::string& path, const ComplexField<double>& f) {
    write_field_dump_impl(path, f);
}

AnyField read_field_dump(const std::string& path, Domain domain) {
    std::vector<uint8_t> b = read_binary_file(path);
    if (b.size() < 13 || std::memcmp(b.data(), "HGF1", 4) != 0)
        fail("not an HGF1 field dump: " + path);
    uint32_t nx = rd32(b, 4), ny = rd32(b, 8);
    uint8_t code = b[12];
    if (nx == 0 || ny == 0 || nx > (1u << 20) || ny > (1u << 20))
        fail("HGF1: implausible dimensions in " + path);
    if (code == 2)
        fail("HGF1: 16-bit fields are not enabled in this build: " + path);
    if (code != 4 && code != 8)
        fail("HGF1: unknown precision code " + std::to_string(code) + " in " + path);
    size_t count = static_cast<size_t>(nx) * ny;
    size_t expected = 13 + count * 2 * code;
    if (b.size() != expected)
        fail("HGF1: size mismatch (expected " + std::to_string(expected) + " bytes) in " + path);
    const uint8_t* p = b.data() + 13;
    if (code == 4) {
        ComplexField<float> f(static_cast<int>(nx), static_cast<int>(ny), domain);
        for (size_t i = 0; i < count; ++i, p += 8)
            f.data[i] = {get_f32le(p), get_f32le(p + 4)};
        require_finite(f, "field dump " + path);
        return f;
    }
    ComplexField<double> f(static_cast<int>(nx), static_cast<int>(ny), domain);
    for (size_t i = 0; i < count; ++i, p += 16)
        f.data[i] = {get_f64le(p), get_f64le(p + 8)};
    require_finite(f, "field dump " + path);
    return f;
}

std::string trace_csv(const MetricTrace& trace, const std::vector<MetricTrace>& extra) {
    std::string out = "iteration,metric,value\n";
    auto emit = [&out](const MetricTrace& t) {
        for (const auto& [it, v] : t.points) {
            out += std::to_string(it);
            out += ',';
            out += t.name;
            out += ',';
            out += detail::format_double(v);
            out += '\n';
        }
    };
    emit(trace);
    for (const MetricTrace& t : extra) emit(t);
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open file: " + path);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail("read error: " + path);
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    write_binary_file(path, reinterpret_cast<const uint8_t*>(content.data()), content.size());
}

} // namespace hologen
