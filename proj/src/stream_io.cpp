#include "imbstream/stream_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace imbs {

namespace {

constexpr const char* kCsvHeader = "att1,att2,att3,att4,att5,class,gen_type";
constexpr const char* kCsvHeaderNoType = "att1,att2,att3,att4,att5,class";

void put_double(std::ostream& os, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    os.write(buf, res.ptr - buf);
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct Field {
    std::string text;
    std::size_t column;  // 1-based
};

std::vector<Field> split_fields(const std::string& line) {
    std::vector<Field> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto end = comma == std::string::npos ? line.size() : comma;
        out.push_back({line.substr(start, end - start), start + 1});
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

class RowParser {
public:
    explicit RowParser(const std::string& source) : source_(source) {}

    [[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& msg) const {
        throw StreamFormatError(source_, line, column, msg);
    }

    double number(const Field& f, std::size_t line) const {
        const std::string t = trim(f.text);
        double v = 0.0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
            fail(line, f.column, "expected a number, got '" + f.text + "'");
        }
        if (!std::isfinite(v)) fail(line, f.column, "attribute value must be finite");
        return v;
    }

    ClassIndex class_index(const Field& f, std::size_t line) const {
        const std::string t = trim(f.text);
        ClassIndex v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
            fail(line, f.column, "expected a non-negative class index, got '" + f.text + "'");
        }
        return v;
    }

private:
    std::string source_;
};

}  // namespace

StreamFormatError::StreamFormatError(const std::string& source, std::size_t line, std::size_t column,
                                     const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

StreamFormat parse_stream_format(const std::string& s) {
    const std::string l = lower(s);
    if (l == "csv") return StreamFormat::Csv;
    if (l == "arff") return StreamFormat::Arff;
    throw std::invalid_argument("unsupported stream format '" + s + "' (expected csv or arff)");
}

StreamFormat format_from_path(const std::string& path) {
    const std::string l = lower(path);
    return l.size() >= 5 && l.ends_with(".arff") ? StreamFormat::Arff : StreamFormat::Csv;
}

void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& os, const LabeledExample& ex) {
    for (double v : ex.x) {
        put_double(os, v);
        os << ',';
    }
    os << ex.y << ',';
    if (ex.gen_type) os << to_string(*ex.gen_type);
    os << '\n';
}

void write_csv(std::ostream& os, std::span<const LabeledExample> stream) {
    write_csv_header(os);
    for (const auto& ex : stream) write_csv_row(os, ex);
}

void write_arff_header(std::ostream& os, const std::string& relation, std::size_t num_classes) {
    os << "@relation " << (relation.empty() ? "stream" : relation) << "\n\n";
    for (std::size_t a = 1; a <= kNumAttributes; ++a) os << "@attribute att" << a << " numeric\n";
    os << "@attribute class {";
    for (std::size_t k = 0; k < num_classes; ++k) os << (k ? "," : "") << k;
    os << "}\n\n@data\n";
}

void write_arff_row(std::ostream& os, const LabeledExample& ex) {
    for (double v : ex.x) {
        put_double(os, v);
        os << ',';
    }
    os << ex.y << '\n';
}

void write_arff(std::ostream& os, std::span<const LabeledExample> stream, const std::string& relation,
                std::size_t num_classes) {
    write_arff_header(os, relation, num_classes);
    for (const auto& ex : stream) write_arff_row(os, ex);
}

std::vector<LabeledExample> read_csv(std::istream& is, const std::string& source) {
    RowParser parser(source);
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    bool has_type = true;
    std::vector<LabeledExample> out;
    while (std::getline(is, line)) {
        ++line_no;
        strip_cr(line);
        if (!header) {
            if (line == kCsvHeader) {
                has_type = true;
            } else if (line == kCsvHeaderNoType) {
                has_type = false;
            } else {
                parser.fail(line_no, 1, std::string("expected header '") + kCsvHeader + "'");
            }
            header = true;
            continue;
        }
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        const std::size_t expected = kNumAttributes + (has_type ? 2 : 1);
        if (fields.size() != expected) {
            const std::size_t col = fields.size() > expected ? fields[expected].column : line.size() + 1;
            parser.fail(line_no, col,
                        "expected " + std::to_string(expected) + " fields, found " + std::to_string(fields.size()));
        }
        LabeledExample ex;
        ex.t = out.size() + 1;
        for (std::size_t a = 0; a < kNumAttributes; ++a) ex.x[a] = parser.number(fields[a], line_no);
        ex.y = parser.class_index(fields[kNumAttributes], line_no);
        if (has_type) {
            const Field& f = fields[kNumAttributes + 1];
            const std::string t = trim(f.text);
            if (!t.empty()) {
                ex.gen_type = parse_example_type(t);
                if (!ex.gen_type) parser.fail(line_no, f.column, "unknown gen_type '" + t + "'");
            }
        }
        out.push_back(ex);
    }
    if (!header) parser.fail(1, 1, "empty file: missing header");
    return out;
}

std::vector<LabeledExample> read_arff(std::istream& is, const std::string& source) {
    RowParser parser(source);
    std::string line;
    std::size_t line_no = 0;
    std::size_t numeric = 0;
    std::vector<std::string> class_values;
    bool data = false;
    std::vector<LabeledExample> out;
    while (std::getline(is, line)) {
        ++line_no;
        strip_cr(line);
        const std::string t = trim(line);
        if (t.empty() || t[0] == '%') continue;
        if (!data) {
            const std::string l = lower(t);
            if (l.starts_with("@relation")) continue;
            if (l.starts_with("@data")) {
                if (numeric != kNumAttributes || class_values.empty()) {
                    parser.fail(line_no, 1, "header must declare 5 numeric attributes and a nominal class");
                }
                data = true;
                continue;
            }
            if (!l.starts_with("@attribute")) parser.fail(line_no, 1, "unexpected header line");
            std::istringstream ls(t.substr(10));
            std::string name;
            ls >> name;
            std::string type;
            std::getline(ls, type);
            type = trim(type);
            if (lower(type) == "numeric" || lower(type) == "real") {
                if (!class_values.empty()) parser.fail(line_no, 1, "numeric attribute after the class attribute");
                ++numeric;
            } else if (!type.empty() && type.front() == '{' && type.back() == '}') {
                std::stringstream vs(type.substr(1, type.size() - 2));
                std::string v;
                while (std::getline(vs, v, ',')) class_values.push_back(trim(v));
            } else {
                parser.fail(line_no, line.find(type) + 1, "unsupported attribute type '" + type + "'");
            }
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != kNumAttributes + 1) {
            parser.fail(line_no, line.size() + 1,
                        "expected " + std::to_string(kNumAttributes + 1) + " fields, found " +
                            std::to_string(fields.size()));
        }
        LabeledExample ex;
        ex.t = out.size() + 1;
        for (std::size_t a = 0; a < kNumAttributes; ++a) ex.x[a] = parser.number(fields[a], line_no);
        const Field& cf = fields[kNumAttributes];
        const auto it = std::find(class_values.begin(), class_values.end(), trim(cf.text));
        if (it == class_values.end()) parser.fail(line_no, cf.column, "undeclared class value '" + cf.text + "'");
        ex.y = static_cast<ClassIndex>(it - class_values.begin());
        out.push_back(ex);
    }
    if (!data) parser.fail(line_no + 1, 1, line_no == 0 ? "empty file" : "missing @data section");
    return out;
}

std::vector<LabeledExample> read_stream_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open stream file '" + path + "'");
    return format_from_path(path) == StreamFormat::Arff ? read_arff(in, path) : read_csv(in, path);
}

std::size_t infer_num_classes(std::span<const LabeledExample> stream) {
    std::size_t k = 0;
    for (const auto& ex : stream) k = std::max<std::size_t>(k, ex.y + 1);
    return k;
}

}  // namespace imbs
