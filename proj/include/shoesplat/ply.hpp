#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shoesplat::ply {

enum class Format { Ascii, BinaryLittleEndian, BinaryBigEndian };
enum class Type { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

/// A property column. Scalars hold one value per element; lists hold a flat
/// value array indexed through `list_offsets` (size count + 1). Every PLY type
/// is exactly representable as a double.
struct Property {
  std::string name;
  Type type = Type::Float32;
  std::optional<Type> list_count_type;
  std::vector<double> values;
  std::vector<std::uint32_t> list_offsets;

  bool is_list() const { return list_count_type.has_value(); }
};

struct Element {
  std::string name;
  size_t count = 0;
  std::vector<Property> properties;

  const Property* find(std::string_view property) const;
  Property* find(std::string_view property);
};

struct File {
  Format format = Format::BinaryLittleEndian;
  std::vector<std::string> comments;
  std::vector<Element> elements;

  const Element* find(std::string_view element) const;
  Element* find(std::string_view element);
};

/// Throws FormatError on malformed headers or bodies.
File parse(std::string_view bytes);
std::string serialize(const File& file);

Property scalar(std::string name, Type type, std::vector<double> values);
Property list(std::string name, Type count_type, Type type,
              const std::vector<std::vector<double>>& rows);

}  // namespace shoesplat::ply
