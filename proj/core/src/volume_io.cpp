#include "sct/volume_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <vector>

#include "sct/errors.hpp"

namespace sct {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'T', 'V'};
constexpr std::uint32_t kVersion = 1;

void write_payload(const std::string& path, VolumeKind kind, std::uint32_t d0, std::uint32_t d1,
                   std::uint32_t d2, std::uint64_t config_hash,
                   const std::vector<double>& data) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("write_volume: cannot open " + path);
    os.write(kMagic, 4);
    const std::uint32_t head[5] = {kVersion, static_cast<std::uint32_t>(kind), d0, d1, d2};
    os.write(reinterpret_cast<const char*>(head), sizeof head);
    os.write(reinterpret_cast<const char*>(&config_hash), sizeof config_hash);
    std::vector<float> payload(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) payload[i] = static_cast<float>(data[i]);
    os.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!os) throw io_error("write_volume: write failed for " + path);
}

VolumeHeader read_header(std::ifstream& is, const std::string& path) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw io_error("read_volume: bad magic in " + path);
    std::uint32_t head[5];
    is.read(reinterpret_cast<char*>(head), sizeof head);
    if (!is || head[0] != kVersion) throw io_error("read_volume: unsupported version in " + path);
    VolumeHeader h;
    h.kind = static_cast<VolumeKind>(head[1]);
    h.dims[0] = head[2];
    h.dims[1] = head[3];
    h.dims[2] = head[4];
    is.read(reinterpret_cast<char*>(&h.config_hash), sizeof h.config_hash);
    if (!is) throw io_error("read_volume: truncated header in " + path);
    return h;
}

std::vector<double> read_payload(std::ifstream& is, const VolumeHeader& h,
                                 const std::string& path) {
    const std::size_t count =
        static_cast<std::size_t>(h.dims[0]) * h.dims[1] * h.dims[2];
    std::vector<float> payload(count);
    is.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (!is) throw io_error("read_volume: truncated payload in " + path);
    std::vector<double> data(count);
    for (std::size_t i = 0; i < count; ++i) data[i] = payload[i];
    return data;
}

} // namespace

void write_volume(const std::string& path, const SpectralImage& img, std::uint64_t config_hash) {
    write_payload(path, VolumeKind::Image, static_cast<std::uint32_t>(img.channels),
                  static_cast<std::uint32_t>(img.height), static_cast<std::uint32_t>(img.width),
                  config_hash, img.data);
}

void write_volume(const std::string& path, const SpectralSinogram& sino,
                  std::uint64_t config_hash) {
    write_payload(path, VolumeKind::Sinogram, static_cast<std::uint32_t>(sino.channels),
                  static_cast<std::uint32_t>(sino.views), static_cast<std::uint32_t>(sino.bins),
                  config_hash, sino.data);
}

VolumeHeader peek_volume(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("peek_volume: cannot open " + path);
    return read_header(is, path);
}

SpectralImage read_volume_image(const std::string& path, double pixel_size_cm,
                                VolumeHeader* header) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("read_volume_image: cannot open " + path);
    const VolumeHeader h = read_header(is, path);
    if (h.kind != VolumeKind::Image)
        throw io_error("read_volume_image: " + path + " is not an image volume");
    SpectralImage img(static_cast<int>(h.dims[0]), static_cast<int>(h.dims[1]),
                      static_cast<int>(h.dims[2]), pixel_size_cm);
    img.data = read_payload(is, h, path);
    if (header) *header = h;
    return img;
}

SpectralSinogram read_volume_sinogram(const std::string& path, VolumeHeader* header) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("read_volume_sinogram: cannot open " + path);
    const VolumeHeader h = read_header(is, path);
    if (h.kind != VolumeKind::Sinogram)
        throw io_error("read_volume_sinogram: " + path + " is not a sinogram volume");
    SpectralSinogram sino(static_cast<int>(h.dims[0]), static_cast<int>(h.dims[1]),
                          static_cast<int>(h.dims[2]));
    sino.data = read_payload(is, h, path);
    if (header) *header = h;
    return sino;
}

void write_pgm(const std::string& path, std::span<const double> plane, int height, int width,
               double vmax) {
    if (plane.size() != static_cast<std::size_t>(height) * width)
        throw std::invalid_argument("write_pgm: size mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("write_pgm: cannot open " + path);
    os << "P5\n" << width << " " << height << "\n255\n";
    std::vector<unsigned char> row(width);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const double v = std::clamp(plane[static_cast<std::size_t>(r) * width + c], 0.0,
                                        vmax);
            row[c] = static_cast<unsigned char>(255.0 * v / vmax + 0.5);
        }
        os.write(reinterpret_cast<const char*>(row.data()), width);
    }
    if (!os) throw io_error("write_pgm: write failed for " + path);
}

} // namespace sct
