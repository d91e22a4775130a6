#include "shoesplat/ply.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>

#include "shoesplat/error.hpp"

namespace shoesplat::ply {
namespace {

[[noreturn]] void format_error(const std::string& message) {
  fail(ErrorKind::FormatError, "ply: " + message);
}

size_t type_size(Type t) {
  switch (t) {
    case Type::Int8: case Type::UInt8: return 1;
    case Type::Int16: case Type::UInt16: return 2;
    case Type::Int32: case Type::UInt32: case Type::Float32: return 4;
    case Type::Float64: return 8;
  }
  return 0;
}

bool is_integer(Type t) { return t != Type::Float32 && t != Type::Float64; }

std::optional<Type> type_from_name(std::string_view n) {
  if (n == "char" || n == "int8") return Type::Int8;
  if (n == "uchar" || n == "uint8") return Type::UInt8;
  if (n == "short" || n == "int16") return Type::Int16;
  if (n == "ushort" || n == "uint16") return Type::UInt16;
  if (n == "int" || n == "int32") return Type::Int32;
  if (n == "uint" || n == "uint32") return Type::UInt32;
  if (n == "float" || n == "float32") return Type::Float32;
  if (n == "double" || n == "float64") return Type::Float64;
  return std::nullopt;
}

std::string_view type_name(Type t) {
  switch (t) {
    case Type::Int8: return "char";
    case Type::UInt8: return "uchar";
    case Type::Int16: return "short";
    case Type::UInt16: return "ushort";
    case Type::Int32: return "int";
    case Type::UInt32: return "uint";
    case Type::Float32: return "float";
    case Type::Float64: return "double";
  }
  return "?";
}

std::pair<double, double> type_range(Type t) {
  switch (t) {
    case Type::Int8: return {-128.0, 127.0};
    case Type::UInt8: return {0.0, 255.0};
    case Type::Int16: return {-32768.0, 32767.0};
    case Type::UInt16: return {0.0, 65535.0};
    case Type::Int32: return {-2147483648.0, 2147483647.0};
    case Type::UInt32: return {0.0, 4294967295.0};
    default: return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
}

/// Coerces a parsed number into the exact set of values the type can hold.
double coerce(double v, Type t) {
  if (t == Type::Float32) return static_cast<double>(static_cast<float>(v));
  if (t == Type::Float64) return v;
  const auto [lo, hi] = type_range(t);
  if (!(v >= lo && v <= hi) || v != std::floor(v)) {
    format_error("value out of range for " + std::string(type_name(t)));
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T load(const char* p, bool swap) {
  T v;
  if (swap) {
    char tmp[sizeof(T)];
    for (size_t i = 0; i < sizeof(T); ++i) tmp[i] = p[sizeof(T) - 1 - i];
    std::memcpy(&v, tmp, sizeof(T));
  } else {
    std::memcpy(&v, p, sizeof(T));
  }
  return v;
}

template <typename T>
void store(std::string& out, T v, bool swap) {
  char tmp[sizeof(T)];
  std::memcpy(tmp, &v, sizeof(T));
  if (swap) std::reverse(tmp, tmp + sizeof(T));
  out.append(tmp, sizeof(T));
}

class BinaryCursor {
 public:
  BinaryCursor(std::string_view bytes, bool swap) : bytes_(bytes), swap_(swap) {}

  double read(Type t) {
    const size_t n = type_size(t);
    if (bytes_.size() - pos_ < n) format_error("unexpected end of binary data");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    switch (t) {
      case Type::Int8: return load<std::int8_t>(p, false);
      case Type::UInt8: return load<std::uint8_t>(p, false);
      case Type::Int16: return load<std::int16_t>(p, swap_);
      case Type::UInt16: return load<std::uint16_t>(p, swap_);
      case Type::Int32: return load<std::int32_t>(p, swap_);
      case Type::UInt32: return load<std::uint32_t>(p, swap_);
      case Type::Float32: return load<float>(p, swap_);
      case Type::Float64: return load<double>(p, swap_);
    }
    return 0.0;
  }

  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  bool swap_;
  size_t pos_ = 0;
};

class AsciiCursor {
 public:
  explicit AsciiCursor(std::string_view text) : text_(text) {}

  double read(Type t) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    size_t end = pos_;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end]))) ++end;
    if (end == pos_) format_error("unexpected end of ascii data");
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + end;
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
      format_error("bad number '" + std::string(text_.substr(pos_, end - pos_)) + "'");
    }
    pos_ = end;
    return coerce(v, t);
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
};

template <typename Cursor>
void read_body(File& file, Cursor& cursor) {
  for (auto& element : file.elements) {
    for (auto& prop : element.properties) {
      prop.values.clear();
      prop.list_offsets.clear();
      if (prop.is_list()) prop.list_offsets.push_back(0);
      else prop.values.reserve(element.count);
    }
    for (size_t i = 0; i < element.count; ++i) {
      for (auto& prop : element.properties) {
        if (prop.is_list()) {
          const double n = cursor.read(*prop.list_count_type);
          if (!(n >= 0) || n != std::floor(n)) format_error("invalid list length");
          const auto len = static_cast<size_t>(n);
          if constexpr (std::is_same_v<Cursor, BinaryCursor>) {
            if (len > cursor.remaining()) format_error("list length exceeds file size");
          }
          for (size_t k = 0; k < len; ++k) prop.values.push_back(cursor.read(prop.type));
          if (prop.values.size() > std::numeric_limits<std::uint32_t>::max()) {
            format_error("list data too large");
          }
          prop.list_offsets.push_back(static_cast<std::uint32_t>(prop.values.size()));
        } else {
          prop.values.push_back(cursor.read(prop.type));
        }
      }
    }
  }
}

void append_number(std::string& out, double v, Type t) {
  char buf[64];
  std::to_chars_result r;
  if (t == Type::Float32) {
    r = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(v));
  } else if (t == Type::Float64) {
    r = std::to_chars(buf, buf + sizeof(buf), v);
  } else {
    r = std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(v));
  }
  out.append(buf, r.ptr);
}

void append_binary(std::string& out, double v, Type t, bool swap) {
  switch (t) {
    case Type::Int8: store(out, static_cast<std::int8_t>(v), false); break;
    case Type::UInt8: store(out, static_cast<std::uint8_t>(v), false); break;
    case Type::Int16: store(out, static_cast<std::int16_t>(v), swap); break;
    case Type::UInt16: store(out, static_cast<std::uint16_t>(v), swap); break;
    case Type::Int32: store(out, static_cast<std::int32_t>(v), swap); break;
    case Type::UInt32: store(out, static_cast<std::uint32_t>(v), swap); break;
    case Type::Float32: store(out, static_cast<float>(v), swap); break;
    case Type::Float64: store(out, v, swap); break;
  }
}

}  // namespace

const Property* Element::find(std::string_view property) const {
  for (const auto& p : properties) {
    if (p.name == property) return &p;
  }
  return nullptr;
}

Property* Element::find(std::string_view property) {
  for (auto& p : properties) {
    if (p.name == property) return &p;
  }
  return nullptr;
}

const Element* File::find(std::string_view element) const {
  for (const auto& e : elements) {
    if (e.name == element) return &e;
  }
  return nullptr;
}

Element* File::find(std::string_view element) {
  for (auto& e : elements) {
    if (e.name == element) return &e;
  }
  return nullptr;
}

File parse(std::string_view bytes) {
  File file;
  size_t pos = 0;
  bool saw_magic = false, saw_format = false;
  for (;;) {
    const size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) format_error("header is not terminated by end_header");
    std::string_view line = bytes.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    const auto tok = split_ws(line);
    if (!saw_magic) {
      if (tok.size() != 1 || tok[0] != "ply") format_error("missing 'ply' magic");
      saw_magic = true;
      continue;
    }
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") {
      if (tok[0] == "comment") {
        const size_t at = line.find("comment") + 7;
        file.comments.emplace_back(at < line.size() ? line.substr(at + 1) : std::string_view{});
      }
      continue;
    }
    if (tok[0] == "format") {
      if (tok.size() != 3) format_error("bad format line");
      if (tok[1] == "ascii") file.format = Format::Ascii;
      else if (tok[1] == "binary_little_endian") file.format = Format::BinaryLittleEndian;
      else if (tok[1] == "binary_big_endian") file.format = Format::BinaryBigEndian;
      else format_error("unknown format '" + std::string(tok[1]) + "'");
      saw_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) format_error("bad element line");
      Element e;
      e.name = std::string(tok[1]);
      size_t count = 0;
      auto [ptr, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), count);
      if (ec != std::errc{} || ptr != tok[2].data() + tok[2].size()) {
        format_error("bad element count");
      }
      e.count = count;
      file.elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (file.elements.empty()) format_error("property before any element");
      Property p;
      if (tok.size() == 5 && tok[1] == "list") {
        const auto ct = type_from_name(tok[2]);
        const auto vt = type_from_name(tok[3]);
        if (!ct || !vt || !is_integer(*ct)) format_error("bad list property types");
        p.list_count_type = *ct;
        p.type = *vt;
        p.name = std::string(tok[4]);
      } else if (tok.size() == 3) {
        const auto t = type_from_name(tok[1]);
        if (!t) format_error("unknown property type '" + std::string(tok[1]) + "'");
        p.type = *t;
        p.name = std::string(tok[2]);
      } else {
        format_error("bad property line");
      }
      file.elements.back().properties.push_back(std::move(p));
    } else {
      format_error("unknown header keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!saw_format) format_error("missing format line");

  const std::string_view body = bytes.substr(pos);
  if (file.format == Format::Ascii) {
    for (const auto& e : file.elements) {
      // Every element row needs at least one character per property.
      if (!e.properties.empty() && e.count > body.size()) format_error("element count exceeds file size");
    }
    AsciiCursor cursor(body);
    read_body(file, cursor);
  } else {
    for (const auto& e : file.elements) {
      size_t row = 0;
      for (const auto& p : e.properties) {
        row += p.is_list() ? type_size(*p.list_count_type) : type_size(p.type);
      }
      if (row > 0 && e.count > body.size() / row) format_error("element count exceeds file size");
    }
    const bool swap = (file.format == Format::BinaryBigEndian) ==
                      (std::endian::native == std::endian::little);
    BinaryCursor cursor(body, swap);
    read_body(file, cursor);
  }
  return file;
}

std::string serialize(const File& file) {
  std::string out = "ply\nformat ";
  switch (file.format) {
    case Format::Ascii: out += "ascii"; break;
    case Format::BinaryLittleEndian: out += "binary_little_endian"; break;
    case Format::BinaryBigEndian: out += "binary_big_endian"; break;
  }
  out += " 1.0\n";
  for (const auto& c : file.comments) out += "comment " + c + "\n";
  for (const auto& e : file.elements) {
    out += "element " + e.name + " " + std::to_string(e.count) + "\n";
    for (const auto& p : e.properties) {
      out += "property ";
      if (p.is_list()) {
        out += "list " + std::string(type_name(*p.list_count_type)) + " ";
      }
      out += std::string(type_name(p.type)) + " " + p.name + "\n";
      const size_t expected = p.is_list() ? e.count + 1 : e.count;
      if ((p.is_list() ? p.list_offsets.size() : p.values.size()) != expected) {
        fail(ErrorKind::InvalidArgument, "ply: property '" + p.name + "' has wrong length");
      }
    }
  }
  out += "end_header\n";

  const bool ascii = file.format == Format::Ascii;
  const bool swap = (file.format == Format::BinaryBigEndian) ==
                    (std::endian::native == std::endian::little);
  for (const auto& e : file.elements) {
    for (size_t i = 0; i < e.count; ++i) {
      bool first = true;
      auto emit = [&](double v, Type t) {
        if (ascii) {
          if (!first) out.push_back(' ');
          append_number(out, v, t);
        } else {
          append_binary(out, v, t, swap);
        }
        first = false;
      };
      for (const auto& p : e.properties) {
        if (p.is_list()) {
          const auto b = p.list_offsets[i], en = p.list_offsets[i + 1];
          emit(static_cast<double>(en - b), *p.list_count_type);
          for (auto k = b; k < en; ++k) emit(p.values[k], p.type);
        } else {
          emit(p.values[i], p.type);
        }
      }
      if (ascii) out.push_back('\n');
    }
  }
  return out;
}

Property scalar(std::string name, Type type, std::vector<double> values) {
  Property p;
  p.name = std::move(name);
  p.type = type;
  p.values = std::move(values);
  return p;
}

Property list(std::string name, Type count_type, Type type,
              const std::vector<std::vector<double>>& rows) {
  Property p;
  p.name = std::move(name);
  p.type = type;
  p.list_count_type = count_type;
  p.list_offsets.reserve(rows.size() + 1);
  p.list_offsets.push_back(0);
  for (const auto& row : rows) {
    p.values.insert(p.values.end(), row.begin(), row.end());
    p.list_offsets.push_back(static_cast<std::uint32_t>(p.values.size()));
  }
  return p;
}

}  // namespace shoesplat::ply
