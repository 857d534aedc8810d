#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace lobx {

// Line-oriented CSV writer with fixed float formatting (%.12g), so identical
// runs produce byte-identical files.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    }

    void header(const std::string& h) { out_ << h << "\n"; }

    CsvWriter& field(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        sep();
        out_ << buf;
        return *this;
    }
    CsvWriter& field(long long v) {
        sep();
        out_ << v;
        return *this;
    }
    CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(const std::string& v) {
        sep();
        out_ << v;
        return *this;
    }
    void endrow() {
        out_ << "\n";
        first_ = true;
    }

private:
    void sep() {
        if (!first_) out_ << ",";
        first_ = false;
    }
    std::ofstream out_;
    bool first_ = true;
};

} // namespace lobx
