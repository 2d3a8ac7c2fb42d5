#include "uscal/image.hpp"

#include <fstream>

#include "uscal/error.hpp"

namespace uscal {
namespace {

// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c)) {
                tok.push_back(static_cast<char>(in.get()));
            }
            return tok;
        }
    }
    return tok;
}

}  // namespace

void BScanGeometry::validate() const {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    }
    if (!(s_x > 0.0) || !(s_y > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "pixel scale factors must be positive");
    }
}

BScanImage read_pgm(const std::string& path, double s_x, double s_y) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::MissingFile, "cannot open " + path);
    }
    if (next_token(in) != "P5") {
        throw Error(ErrorCode::ParseError, path + ": not a binary (P5) PGM file");
    }
    int width = 0, height = 0, maxval = 0;
    try {
        width = std::stoi(next_token(in));
        height = std::stoi(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, path + ": malformed PGM header");
    }
    if (width <= 0 || height <= 0 || maxval != 255) {
        throw Error(ErrorCode::ParseError, path + ": unsupported PGM header (need maxval 255)");
    }
    in.get();  // single whitespace after maxval

    BScanImage img({width, height, s_x, s_y});
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
        throw Error(ErrorCode::ParseError, path + ": truncated pixel data");
    }
    return img;
}

void write_pgm(const BScanImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path);
    }
    out << "P5\n" << img.geometry.width << " " << img.geometry.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) {
        throw Error(ErrorCode::IoError, "failed writing " + path);
    }
}

}  // namespace uscal
