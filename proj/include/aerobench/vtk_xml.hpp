#pragma once

// Reader/writer for the VTK XML PolyData (.vtp) and UnstructuredGrid (.vtu)
// subset: ascii and raw-appended (uncompressed, little-endian) encodings.

#include <aerobench/core.hpp>
#include <aerobench/mesh.hpp>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace aerobench {

enum class VtkEncoding
{
    Ascii,
    AppendedRaw,
};

namespace vtk_detail {

struct XmlElement
{
    std::string name;
    std::map<std::string, std::string> attributes;
    std::string text;
    std::vector<XmlElement> children;

    const XmlElement* child(std::string_view n) const
    {
        for (const auto& c : children) {
            if (c.name == n) {
                return &c;
            }
        }
        return nullptr;
    }

    std::optional<std::string> attribute(const std::string& key) const
    {
        auto it = attributes.find(key);
        if (it == attributes.end()) {
            return std::nullopt;
        }
        return it->second;
    }
};

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

/// Minimal XML tokenizer for VTK files. Parsing stops at the start of the
/// raw payload of <AppendedData>, whose byte offset is recorded.
class XmlParser
{
public:
    explicit XmlParser(const std::string& text) : s_(text) {}

    XmlElement parse_document()
    {
        skip_misc();
        XmlElement root = parse_element();
        if (!stopped_at_appended_) {
            skip_misc();
            if (pos_ != s_.size()) {
                malformed("trailing content after root element");
            }
        }
        return root;
    }

    std::optional<std::size_t> appended_offset() const { return appended_; }
    std::optional<std::string> appended_encoding() const { return appended_encoding_; }

private:
    [[noreturn]] void malformed(const std::string& what) const
    {
        fail(ErrorCode::MalformedXml, what + " at byte " + std::to_string(pos_));
    }

    bool starts_with(std::string_view p) const { return s_.compare(pos_, p.size(), p) == 0; }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    void skip_until(std::string_view terminator)
    {
        auto at = s_.find(terminator, pos_);
        if (at == std::string::npos) {
            malformed("unterminated construct, expected '" + std::string(terminator) + "'");
        }
        pos_ = at + terminator.size();
    }

    // Prolog, comments, processing instructions, doctype.
    void skip_misc()
    {
        for (;;) {
            skip_ws();
            if (starts_with("<?")) {
                skip_until("?>");
            } else if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<!")) {
                skip_until(">");
            } else {
                return;
            }
        }
    }

    std::string parse_name()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' || c == '.') {
                ++pos_;
            } else {
                break;
            }
        }
        if (pos_ == start) {
            malformed("expected a name");
        }
        return s_.substr(start, pos_ - start);
    }

    static std::string decode_entities(std::string_view raw)
    {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string_view::npos) {
                out.push_back('&');
                continue;
            }
            auto ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "amp") out.push_back('&');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else {
                out.append(raw.substr(i, semi - i + 1));
            }
            i = semi;
        }
        return out;
    }

    XmlElement parse_element()
    {
        if (pos_ >= s_.size() || s_[pos_] != '<') {
            malformed("expected '<'");
        }
        ++pos_;
        XmlElement el;
        el.name = parse_name();
        for (;;) {
            skip_ws();
            if (pos_ >= s_.size()) {
                malformed("unexpected end of file inside tag <" + el.name + ">");
            }
            if (starts_with("/>")) {
                pos_ += 2;
                return el;
            }
            if (s_[pos_] == '>') {
                ++pos_;
                break;
            }
            std::string key = parse_name();
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != '=') {
                malformed("expected '=' after attribute '" + key + "'");
            }
            ++pos_;
            skip_ws();
            if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) {
                malformed("expected quoted value for attribute '" + key + "'");
            }
            const char quote = s_[pos_++];
            auto end = s_.find(quote, pos_);
            if (end == std::string::npos) {
                malformed("unterminated attribute value");
            }
            el.attributes[key] = decode_entities(std::string_view(s_).substr(pos_, end - pos_));
            pos_ = end + 1;
        }

        if (el.name == "AppendedData") {
            // The raw payload starts right after the '_' marker and may contain
            // arbitrary bytes; nothing past it is parsed as XML.
            auto underscore = s_.find('_', pos_);
            if (underscore == std::string::npos) {
                malformed("AppendedData without '_' marker");
            }
            appended_ = underscore + 1;
            auto enc = el.attributes.find("encoding");
            appended_encoding_ = enc == el.attributes.end() ? std::string("raw") : enc->second;
            stopped_at_appended_ = true;
            return el;
        }

        for (;;) {
            const std::size_t text_start = pos_;
            auto lt = s_.find('<', pos_);
            if (lt == std::string::npos) {
                malformed("unterminated element <" + el.name + ">");
            }
            el.text.append(decode_entities(std::string_view(s_).substr(text_start, lt - text_start)));
            pos_ = lt;
            if (starts_with("<!--")) {
                skip_until("-->");
                continue;
            }
            if (starts_with("</")) {
                pos_ += 2;
                std::string closing = parse_name();
                if (closing != el.name) {
                    malformed("mismatched closing tag </" + closing + "> for <" + el.name + ">");
                }
                skip_ws();
                if (pos_ >= s_.size() || s_[pos_] != '>') {
                    malformed("expected '>'");
                }
                ++pos_;
                return el;
            }
            el.children.push_back(parse_element());
            if (stopped_at_appended_) {
                return el;
            }
        }
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    bool stopped_at_appended_ = false;
    std::optional<std::size_t> appended_;
    std::optional<std::string> appended_encoding_;
};

template <typename T>
T load_le(const char* p)
{
    T v;
    std::memcpy(&v, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
        auto* b = reinterpret_cast<unsigned char*>(&v);
        std::reverse(b, b + sizeof(T));
    }
    return v;
}

template <typename T>
void store_le(std::string& out, T v)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
        std::reverse(buf, buf + sizeof(T));
    }
    out.append(buf, sizeof(T));
}

inline std::size_t type_size(const std::string& type)
{
    if (type == "Int8" || type == "UInt8") return 1;
    if (type == "Int16" || type == "UInt16") return 2;
    if (type == "Int32" || type == "UInt32" || type == "Float32") return 4;
    if (type == "Int64" || type == "UInt64" || type == "Float64") return 8;
    fail(ErrorCode::UnsupportedEncoding, "unsupported DataArray type '" + type + "'");
}

inline bool is_real_type(const std::string& type) { return type == "Float32" || type == "Float64"; }

struct FileContext
{
    const std::string* bytes = nullptr;
    std::optional<std::size_t> appended;
    bool header64 = false;
    std::string path;
};

// Returns the payload of one DataArray as a list of numbers. Integers are
// returned in `ints`, reals in `reals` (exactly one is filled).
struct DecodedArray
{
    std::vector<double> reals;
    std::vector<std::int64_t> ints;
    bool real = false;
    std::size_t count() const { return real ? reals.size() : ints.size(); }
};

inline std::string array_label(const XmlElement& el)
{
    auto name = el.attribute("Name");
    return name ? "'" + *name + "'" : std::string("(unnamed)");
}

inline DecodedArray decode_ascii(const XmlElement& el, const std::string& type)
{
    DecodedArray out;
    out.real = is_real_type(type);
    const char* p = el.text.data();
    const char* end = p + el.text.size();
    while (p < end) {
        while (p < end && std::isspace(static_cast<unsigned char>(*p))) {
            ++p;
        }
        if (p >= end) {
            break;
        }
        const char* tok = p;
        while (p < end && !std::isspace(static_cast<unsigned char>(*p))) {
            ++p;
        }
        std::string token(tok, p);
        if (out.real) {
            char* stop = nullptr;
            double v = std::strtod(token.c_str(), &stop);
            if (stop != token.c_str() + token.size()) {
                fail(ErrorCode::MalformedXml, "bad real '" + token + "' in DataArray " + array_label(el));
            }
            if (type == "Float32") {
                v = static_cast<double>(static_cast<float>(v));
            }
            out.reals.push_back(v);
        } else {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc() || ptr != token.data() + token.size()) {
                fail(ErrorCode::MalformedXml, "bad integer '" + token + "' in DataArray " + array_label(el));
            }
            out.ints.push_back(v);
        }
    }
    return out;
}

inline DecodedArray decode_appended(const XmlElement& el, const std::string& type, const FileContext& ctx,
                                    std::size_t expected_values)
{
    if (!ctx.appended) {
        fail(ErrorCode::MalformedXml, "DataArray " + array_label(el) + " is appended but the file has no AppendedData");
    }
    auto off_attr = el.attribute("offset");
    if (!off_attr) {
        fail(ErrorCode::MalformedXml, "appended DataArray " + array_label(el) + " lacks an offset");
    }
    std::size_t offset = 0;
    {
        auto [ptr, ec] = std::from_chars(off_attr->data(), off_attr->data() + off_attr->size(), offset);
        if (ec != std::errc()) {
            fail(ErrorCode::MalformedXml, "bad offset '" + *off_attr + "'");
        }
    }
    const std::string& bytes = *ctx.bytes;
    const std::size_t header_size = ctx.header64 ? 8 : 4;
    const std::size_t start = *ctx.appended + offset;
    if (start + header_size > bytes.size()) {
        fail(ErrorCode::TruncatedFile, "appended block of " + array_label(el) + " starts past end of file");
    }
    const std::uint64_t nbytes = ctx.header64 ? load_le<std::uint64_t>(bytes.data() + start)
                                              : load_le<std::uint32_t>(bytes.data() + start);
    const std::size_t width = type_size(type);
    if (nbytes != expected_values * width) {
        fail(ErrorCode::CountMismatch, "DataArray " + array_label(el) + " block holds " + std::to_string(nbytes) +
                                           " bytes, expected " + std::to_string(expected_values * width));
    }
    const std::size_t data = start + header_size;
    if (data + nbytes > bytes.size()) {
        fail(ErrorCode::TruncatedFile, "appended block of " + array_label(el) + " runs past end of file");
    }
    DecodedArray out;
    out.real = is_real_type(type);
    const char* p = bytes.data() + data;
    if (out.real) {
        out.reals.resize(expected_values);
        for (std::size_t i = 0; i < expected_values; ++i) {
            out.reals[i] = type == "Float32" ? static_cast<double>(load_le<float>(p + i * 4))
                                             : load_le<double>(p + i * 8);
        }
    } else {
        out.ints.resize(expected_values);
        for (std::size_t i = 0; i < expected_values; ++i) {
            const char* q = p + i * width;
            std::int64_t v = 0;
            if (type == "Int8") v = load_le<std::int8_t>(q);
            else if (type == "UInt8") v = load_le<std::uint8_t>(q);
            else if (type == "Int16") v = load_le<std::int16_t>(q);
            else if (type == "UInt16") v = load_le<std::uint16_t>(q);
            else if (type == "Int32") v = load_le<std::int32_t>(q);
            else if (type == "UInt32") v = load_le<std::uint32_t>(q);
            else if (type == "Int64") v = load_le<std::int64_t>(q);
            else v = static_cast<std::int64_t>(load_le<std::uint64_t>(q));
            out.ints[i] = v;
        }
    }
    return out;
}

/// Decodes a DataArray holding `tuples` tuples. For ascii arrays the count
/// is checked after parsing; for appended arrays the block header must agree.
inline DecodedArray decode_array(const XmlElement& el, const FileContext& ctx, std::size_t tuples,
                                 std::optional<int> required_components = std::nullopt)
{
    auto type = el.attribute("type");
    if (!type) {
        fail(ErrorCode::MalformedXml, "DataArray " + array_label(el) + " has no type");
    }
    type_size(*type);
    int components = 1;
    if (auto nc = el.attribute("NumberOfComponents")) {
        components = std::atoi(nc->c_str());
    }
    if (required_components && components != *required_components) {
        fail(ErrorCode::CountMismatch, "DataArray " + array_label(el) + " has " + std::to_string(components) +
                                           " components, expected " + std::to_string(*required_components));
    }
    if (components < 1) {
        fail(ErrorCode::MalformedXml, "DataArray " + array_label(el) + " has invalid component count");
    }
    const std::size_t expected = tuples * static_cast<std::size_t>(components);
    const std::string format = el.attribute("format").value_or("ascii");
    DecodedArray out;
    if (format == "ascii") {
        out = decode_ascii(el, *type);
    } else if (format == "appended") {
        out = decode_appended(el, *type, ctx, expected);
    } else {
        fail(ErrorCode::UnsupportedEncoding, "DataArray " + array_label(el) + " uses format '" + format +
                                                 "'; only ascii and raw appended are supported");
    }
    if (out.count() != expected) {
        fail(ErrorCode::CountMismatch, "DataArray " + array_label(el) + " has " + std::to_string(out.count()) +
                                           " values, expected " + std::to_string(expected));
    }
    return out;
}

inline std::size_t count_attribute(const XmlElement& el, const std::string& key, bool required = true)
{
    auto v = el.attribute(key);
    if (!v) {
        if (required) {
            fail(ErrorCode::MalformedXml, "<" + el.name + "> lacks " + key);
        }
        return 0;
    }
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), n);
    if (ec != std::errc() || ptr != v->data() + v->size()) {
        fail(ErrorCode::MalformedXml, "bad " + key + " '" + *v + "'");
    }
    return n;
}

inline const XmlElement* find_array(const XmlElement* parent, std::string_view name)
{
    if (!parent) {
        return nullptr;
    }
    for (const auto& c : parent->children) {
        if (c.name == "DataArray" && c.attribute("Name").value_or("") == name) {
            return &c;
        }
    }
    return nullptr;
}

inline std::vector<Vec3> read_points(const XmlElement& piece, const FileContext& ctx, std::size_t npoints,
                                     ScalarType& type)
{
    const XmlElement* pts = piece.child("Points");
    if (npoints == 0 && !pts) {
        return {};
    }
    if (!pts || !pts->child("DataArray")) {
        fail(ErrorCode::MalformedXml, "<Piece> lacks <Points>");
    }
    const XmlElement& arr = *pts->child("DataArray");
    auto t = arr.attribute("type").value_or("");
    if (!is_real_type(t)) {
        fail(ErrorCode::UnsupportedEncoding, "Points must be Float32 or Float64, got '" + t + "'");
    }
    type = t == "Float32" ? ScalarType::Float32 : ScalarType::Float64;
    auto decoded = decode_array(arr, ctx, npoints, 3);
    std::vector<Vec3> points(npoints);
    for (std::size_t i = 0; i < npoints; ++i) {
        points[i] = {decoded.reals[3 * i], decoded.reals[3 * i + 1], decoded.reals[3 * i + 2]};
    }
    return points;
}

inline FieldSet read_fields(const XmlElement* data, const FileContext& ctx, std::size_t tuples)
{
    FieldSet fields;
    if (!data) {
        return fields;
    }
    for (const auto& c : data->children) {
        if (c.name != "DataArray") {
            continue;
        }
        auto name = c.attribute("Name");
        if (!name) {
            fail(ErrorCode::MalformedXml, "field DataArray without Name");
        }
        auto t = c.attribute("type").value_or("");
        auto decoded = decode_array(c, ctx, tuples);
        DataArray a;
        a.name = *name;
        a.components = static_cast<int>(decoded.count() / std::max<std::size_t>(tuples, 1));
        if (tuples == 0) {
            a.components = std::atoi(c.attribute("NumberOfComponents").value_or("1").c_str());
        }
        if (a.components != 1 && a.components != 3) {
            fail(ErrorCode::CountMismatch, "field '" + a.name + "' has " + std::to_string(a.components) +
                                               " components; only 1 or 3 are supported");
        }
        if (decoded.real) {
            a.type = t == "Float32" ? ScalarType::Float32 : ScalarType::Float64;
            a.values = std::move(decoded.reals);
        } else {
            // Integer-valued fields are promoted to Float64.
            a.type = ScalarType::Float64;
            a.values.assign(decoded.ints.begin(), decoded.ints.end());
        }
        fields.set(std::move(a));
    }
    return fields;
}

inline CellArray read_cell_array(const XmlElement* section, const FileContext& ctx, std::size_t ncells,
                                 const char* what)
{
    CellArray cells;
    if (ncells == 0) {
        return cells;
    }
    const XmlElement* conn = find_array(section, "connectivity");
    const XmlElement* offs = find_array(section, "offsets");
    if (!conn || !offs) {
        fail(ErrorCode::MalformedXml, std::string(what) + " lacks connectivity/offsets arrays");
    }
    auto offsets = decode_array(*offs, ctx, ncells, 1);
    if (offsets.real) {
        fail(ErrorCode::MalformedXml, std::string(what) + " offsets must be integers");
    }
    const std::size_t nconn = static_cast<std::size_t>(std::max<std::int64_t>(offsets.ints.back(), 0));
    auto connectivity = decode_array(*conn, ctx, nconn, 1);
    if (connectivity.real) {
        fail(ErrorCode::MalformedXml, std::string(what) + " connectivity must be integers");
    }
    const std::string ctype = conn->attribute("type").value_or("Int64");
    cells.index_type = (ctype == "Int32" || ctype == "UInt32" || ctype == "Int16" || ctype == "UInt16" ||
                        ctype == "Int8" || ctype == "UInt8")
                           ? IndexType::Int32
                           : IndexType::Int64;
    cells.offsets = std::move(offsets.ints);
    cells.connectivity = std::move(connectivity.ints);
    return cells;
}

struct ParsedFile
{
    std::string bytes;
    XmlElement root;
    FileContext ctx;
};

inline ParsedFile parse_vtk_file(const std::string& path, const std::string& expected_type)
{
    ParsedFile f;
    f.bytes = read_file(path);
    XmlParser parser(f.bytes);
    f.root = parser.parse_document();
    if (f.root.name != "VTKFile") {
        fail(ErrorCode::MalformedXml, "root element is <" + f.root.name + ">, expected <VTKFile>");
    }
    if (f.root.attribute("type").value_or("") != expected_type) {
        fail(ErrorCode::MalformedXml, "VTKFile type is '" + f.root.attribute("type").value_or("") +
                                          "', expected '" + expected_type + "'");
    }
    if (auto c = f.root.attribute("compressor"); c && !c->empty()) {
        fail(ErrorCode::UnsupportedEncoding, "compressed data ('" + *c + "') is not supported");
    }
    if (auto bo = f.root.attribute("byte_order"); bo && *bo != "LittleEndian") {
        fail(ErrorCode::UnsupportedEncoding, "byte_order '" + *bo + "' is not supported");
    }
    auto header = f.root.attribute("header_type").value_or("UInt32");
    if (header != "UInt32" && header != "UInt64") {
        fail(ErrorCode::UnsupportedEncoding, "header_type '" + header + "' is not supported");
    }
    if (auto enc = parser.appended_encoding(); enc && *enc != "raw") {
        fail(ErrorCode::UnsupportedEncoding, "AppendedData encoding '" + *enc + "' is not supported");
    }
    f.ctx.header64 = header == "UInt64";
    f.ctx.appended = parser.appended_offset();
    f.ctx.path = path;
    return f;
}

inline const XmlElement& single_piece(const XmlElement& root, const std::string& dataset)
{
    const XmlElement* ds = root.child(dataset);
    if (!ds) {
        fail(ErrorCode::MalformedXml, "missing <" + dataset + ">");
    }
    const XmlElement* piece = nullptr;
    for (const auto& c : ds->children) {
        if (c.name == "Piece") {
            if (piece) {
                fail(ErrorCode::UnsupportedEncoding, "multi-piece files are not supported");
            }
            piece = &c;
        }
    }
    if (!piece) {
        fail(ErrorCode::MalformedXml, "missing <Piece>");
    }
    return *piece;
}

// ---------------------------------------------------------------- writing

class ArrayWriter
{
public:
    explicit ArrayWriter(VtkEncoding enc) : enc_(enc) {}

    void reals(std::string& xml, const std::string& indent, const std::string& name, int components,
               ScalarType type, const double* values, std::size_t count)
    {
        const char* tname = type == ScalarType::Float32 ? "Float32" : "Float64";
        open_tag(xml, indent, tname, name, components);
        if (enc_ == VtkEncoding::Ascii) {
            xml += ">\n" + indent + "  ";
            char buf[40];
            for (std::size_t i = 0; i < count; ++i) {
                if (type == ScalarType::Float32) {
                    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(static_cast<float>(values[i])));
                } else {
                    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
                }
                xml += buf;
                xml += (i + 1) % 9 == 0 && i + 1 < count ? "\n" + indent + "  " : std::string(" ");
            }
            xml += "\n" + indent + "</DataArray>\n";
        } else {
            const std::size_t width = type == ScalarType::Float32 ? 4 : 8;
            begin_block(xml, count * width);
            for (std::size_t i = 0; i < count; ++i) {
                if (type == ScalarType::Float32) {
                    store_le(appended_, static_cast<float>(values[i]));
                } else {
                    store_le(appended_, values[i]);
                }
            }
        }
    }

    template <typename Int>
    void ints(std::string& xml, const std::string& indent, const std::string& name, const char* tname,
              const std::vector<std::int64_t>& values)
    {
        open_tag(xml, indent, tname, name, 1);
        if (enc_ == VtkEncoding::Ascii) {
            xml += ">\n" + indent + "  ";
            for (std::size_t i = 0; i < values.size(); ++i) {
                xml += std::to_string(values[i]);
                xml += (i + 1) % 16 == 0 && i + 1 < values.size() ? "\n" + indent + "  " : std::string(" ");
            }
            xml += "\n" + indent + "</DataArray>\n";
        } else {
            begin_block(xml, values.size() * sizeof(Int));
            for (auto v : values) {
                store_le(appended_, static_cast<Int>(v));
            }
        }
    }

    void cell_array(std::string& xml, const std::string& indent, const CellArray& cells)
    {
        if (cells.index_type == IndexType::Int32) {
            ints<std::int32_t>(xml, indent, "connectivity", "Int32", cells.connectivity);
            ints<std::int32_t>(xml, indent, "offsets", "Int32", cells.offsets);
        } else {
            ints<std::int64_t>(xml, indent, "connectivity", "Int64", cells.connectivity);
            ints<std::int64_t>(xml, indent, "offsets", "Int64", cells.offsets);
        }
    }

    void fields(std::string& xml, const std::string& indent, const FieldSet& set)
    {
        for (const auto& a : set.arrays()) {
            reals(xml, indent, a.name, a.components, a.type, a.values.data(), a.values.size());
        }
    }

    void points(std::string& xml, const std::string& indent, const std::vector<Vec3>& pts, ScalarType type)
    {
        std::vector<double> flat;
        flat.reserve(pts.size() * 3);
        for (const auto& p : pts) {
            flat.insert(flat.end(), {p.x, p.y, p.z});
        }
        reals(xml, indent, "Points", 3, type, flat.data(), flat.size());
    }

    const std::string& appended() const { return appended_; }
    VtkEncoding encoding() const { return enc_; }

private:
    static std::string escape(const std::string& s)
    {
        std::string out;
        for (char c : s) {
            switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
            }
        }
        return out;
    }

    void open_tag(std::string& xml, const std::string& indent, const char* type, const std::string& name,
                  int components)
    {
        xml += indent + "<DataArray type=\"" + type + "\" Name=\"" + escape(name) + "\"";
        if (components != 1) {
            xml += " NumberOfComponents=\"" + std::to_string(components) + "\"";
        }
        xml += enc_ == VtkEncoding::Ascii ? " format=\"ascii\"" : " format=\"appended\"";
    }

    void begin_block(std::string& xml, std::size_t nbytes)
    {
        xml += " offset=\"" + std::to_string(appended_.size()) + "\"/>\n";
        store_le(appended_, static_cast<std::uint64_t>(nbytes));
    }

    VtkEncoding enc_;
    std::string appended_;
};

inline void write_file(const std::string& path, const std::string& xml, const ArrayWriter& w)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    }
    out << xml;
    if (w.encoding() == VtkEncoding::AppendedRaw) {
        out << "  <AppendedData encoding=\"raw\">\n   _";
        out.write(w.appended().data(), static_cast<std::streamsize>(w.appended().size()));
        out << "\n  </AppendedData>\n";
    }
    out << "</VTKFile>\n";
    out.flush();
    if (!out) {
        fail(ErrorCode::IoError, "failed writing '" + path + "'");
    }
}

inline std::string file_header(const char* type)
{
    return std::string("<?xml version=\"1.0\"?>\n<VTKFile type=\"") + type +
           "\" version=\"1.0\" byte_order=\"LittleEndian\" header_type=\"UInt64\">\n";
}

} // namespace vtk_detail

inline PolySurface read_vtp(const std::string& path)
{
    using namespace vtk_detail;
    auto file = parse_vtk_file(path, "PolyData");
    file.ctx.bytes = &file.bytes;
    const XmlElement& piece = single_piece(file.root, "PolyData");

    const std::size_t npoints = count_attribute(piece, "NumberOfPoints");
    const std::size_t nverts = count_attribute(piece, "NumberOfVerts", false);
    const std::size_t npolys = count_attribute(piece, "NumberOfPolys", false);
    if (count_attribute(piece, "NumberOfLines", false) != 0 || count_attribute(piece, "NumberOfStrips", false) != 0) {
        fail(ErrorCode::UnsupportedCellType, "PolyData lines and strips are not supported");
    }

    PolySurface s;
    s.points = read_points(piece, file.ctx, npoints, s.point_type);
    s.verts = read_cell_array(piece.child("Verts"), file.ctx, nverts, "Verts");
    s.polys = read_cell_array(piece.child("Polys"), file.ctx, npolys, "Polys");
    s.point_fields = read_fields(piece.child("PointData"), file.ctx, npoints);
    s.cell_fields = read_fields(piece.child("CellData"), file.ctx, nverts + npolys);
    s.validate();
    return s;
}

inline UnstructuredGrid read_vtu(const std::string& path)
{
    using namespace vtk_detail;
    auto file = parse_vtk_file(path, "UnstructuredGrid");
    file.ctx.bytes = &file.bytes;
    const XmlElement& piece = single_piece(file.root, "UnstructuredGrid");

    const std::size_t npoints = count_attribute(piece, "NumberOfPoints");
    const std::size_t ncells = count_attribute(piece, "NumberOfCells");

    UnstructuredGrid g;
    g.points = read_points(piece, file.ctx, npoints, g.point_type);
    const XmlElement* cells = piece.child("Cells");
    g.cells = read_cell_array(cells, file.ctx, ncells, "Cells");
    if (ncells > 0) {
        const XmlElement* types = find_array(cells, "types");
        if (!types) {
            fail(ErrorCode::MalformedXml, "Cells lacks a types array");
        }
        auto decoded = decode_array(*types, file.ctx, ncells, 1);
        g.types.reserve(ncells);
        for (std::size_t i = 0; i < ncells; ++i) {
            const auto code = decoded.ints[i];
            if (code < 0 || code > 255 || !is_supported_cell_type(static_cast<std::uint8_t>(code))) {
                fail(ErrorCode::UnsupportedCellType,
                     "cell " + std::to_string(i) + " has type code " + std::to_string(code));
            }
            g.types.push_back(static_cast<std::uint8_t>(code));
        }
        const XmlElement* fo = find_array(cells, "faceoffsets");
        const XmlElement* fa = find_array(cells, "faces");
        if (fo && fa) {
            auto face_offsets = decode_array(*fo, file.ctx, ncells, 1);
            std::int64_t nfaces = 0;
            for (auto v : face_offsets.ints) {
                nfaces = std::max(nfaces, v);
            }
            g.face_offsets = std::move(face_offsets.ints);
            g.faces = decode_array(*fa, file.ctx, static_cast<std::size_t>(nfaces), 1).ints;
        }
    }
    g.point_fields = read_fields(piece.child("PointData"), file.ctx, npoints);
    g.cell_fields = read_fields(piece.child("CellData"), file.ctx, ncells);
    g.validate();
    return g;
}

inline void write_vtp(const PolySurface& s, const std::string& path, VtkEncoding encoding = VtkEncoding::AppendedRaw)
{
    using namespace vtk_detail;
    s.validate();
    ArrayWriter w(encoding);
    std::string xml = file_header("PolyData");
    xml += "  <PolyData>\n";
    xml += "    <Piece NumberOfPoints=\"" + std::to_string(s.points.size()) + "\" NumberOfVerts=\"" +
           std::to_string(s.verts.size()) + "\" NumberOfLines=\"0\" NumberOfStrips=\"0\" NumberOfPolys=\"" +
           std::to_string(s.polys.size()) + "\">\n";
    xml += "      <PointData>\n";
    w.fields(xml, "        ", s.point_fields);
    xml += "      </PointData>\n      <CellData>\n";
    w.fields(xml, "        ", s.cell_fields);
    xml += "      </CellData>\n      <Points>\n";
    w.points(xml, "        ", s.points, s.point_type);
    xml += "      </Points>\n";
    if (!s.verts.empty()) {
        xml += "      <Verts>\n";
        w.cell_array(xml, "        ", s.verts);
        xml += "      </Verts>\n";
    }
    if (!s.polys.empty()) {
        xml += "      <Polys>\n";
        w.cell_array(xml, "        ", s.polys);
        xml += "      </Polys>\n";
    }
    xml += "    </Piece>\n  </PolyData>\n";
    write_file(path, xml, w);
}

inline void write_vtu(const UnstructuredGrid& g, const std::string& path,
                      VtkEncoding encoding = VtkEncoding::AppendedRaw)
{
    using namespace vtk_detail;
    g.validate();
    ArrayWriter w(encoding);
    std::string xml = file_header("UnstructuredGrid");
    xml += "  <UnstructuredGrid>\n";
    xml += "    <Piece NumberOfPoints=\"" + std::to_string(g.points.size()) + "\" NumberOfCells=\"" +
           std::to_string(g.cell_count()) + "\">\n";
    xml += "      <PointData>\n";
    w.fields(xml, "        ", g.point_fields);
    xml += "      </PointData>\n      <CellData>\n";
    w.fields(xml, "        ", g.cell_fields);
    xml += "      </CellData>\n      <Points>\n";
    w.points(xml, "        ", g.points, g.point_type);
    xml += "      </Points>\n      <Cells>\n";
    w.cell_array(xml, "        ", g.cells);
    std::vector<std::int64_t> types(g.types.begin(), g.types.end());
    w.ints<std::uint8_t>(xml, "        ", "types", "UInt8", types);
    if (!g.face_offsets.empty()) {
        w.ints<std::int64_t>(xml, "        ", "faces", "Int64", g.faces);
        w.ints<std::int64_t>(xml, "        ", "faceoffsets", "Int64", g.face_offsets);
    }
    xml += "      </Cells>\n    </Piece>\n  </UnstructuredGrid>\n";
    write_file(path, xml, w);
}

} // namespace aerobench
