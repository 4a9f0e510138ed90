#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hologen/field.hpp"
#include "hologen/report.hpp"
#include "hologen/target.hpp"

namespace hologen {

// Decodes an 8-bit PNG or BMP (chosen by file magic) to grayscale in [0,1].
// Color inputs are converted with Rec. 709 luminance.
RealImage read_image_gray(const std::string& path);

RealImage load_target(const std::string& path, Normalization normalize);

// Binary mask from an image: pixels brighter than 50% are inside.
RegionMask load_mask(const std::string& path);

void write_png_gray(const std::string& path, const std::vector<uint8_t>& pixels, int width,
                    int height);
std::vector<uint8_t> read_png_gray8(const std::string& path, int* width, int* height);

// Level-index image: k maps to gray round(255k/(levels-1)), which is
// invertible for levels <= 256.
void write_hologram_png(const std::string& path, const std::vector<int32_t>& levels, int width,
                        int height, int level_count);
std::vector<int32_t> read_hologram_png(const std::string& path, int level_count, int* width,
                                       int* height);

// |R| scaled so the brightest pixel is 255; the amplitude that 255 represents
// is recorded in "<path>.scale.txt" so the image remains quantitative.
void write_replay_png(const std::string& path, const ComplexField<float>& replay);
void write_replay_png(const std::string& path, const ComplexField<double>& replay);

// Raw complex-field dump: magic "HGF1", u32 width, u32 height, u8 bytes per
// scalar (4 or 8; 2 reserved for a 16-bit build), then row-major interleaved
// (re, im) pairs. Everything little-endian.
using AnyField = std::variant<ComplexField<float>, ComplexField<double>>;
void write_field_dump(const std::string& path, const ComplexField<float>& f);
void write_field_dump(const std::string& path, const ComplexField<double>& f);
AnyField read_field_dump(const std::string& path, Domain domain = Domain::Replay);

// Long-format trace CSV: header "iteration,metric,value", one row per point
// of the main trace and any extra traces, values printed as shortest exact
// decimals.
std::string trace_csv(const MetricTrace& trace, const std::vector<MetricTrace>& extra = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace hologen
