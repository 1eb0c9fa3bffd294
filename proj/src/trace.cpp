#include "snm/trace.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace snm {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Line-oriented writer/reader over plain or gzip files.
class TextSink {
  public:
    explicit TextSink(const std::string& path) : gz_(ends_with(path, ".gz")) {
        if (gz_) {
            gzf_ = gzopen(path.c_str(), "wb");
            if (!gzf_) throw std::runtime_error("cannot open " + path);
        } else {
            out_.open(path);
            if (!out_) throw std::runtime_error("cannot open " + path);
        }
    }
    ~TextSink() {
        if (gzf_) gzclose(gzf_);
    }
    void write(const std::string& s) {
        if (gz_) {
            if (gzwrite(gzf_, s.data(), static_cast<unsigned>(s.size())) <= 0 && !s.empty())
                throw std::runtime_error("gzwrite failed");
        } else {
            out_ << s;
        }
    }

  private:
    bool gz_;
    gzFile gzf_ = nullptr;
    std::ofstream out_;
};

std::string slurp(const std::string& path) {
    if (ends_with(path, ".gz")) {
        gzFile f = gzopen(path.c_str(), "rb");
        if (!f) throw std::runtime_error("cannot open " + path);
        std::string text;
        char buf[1 << 16];
        int n;
        while ((n = gzread(f, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
        gzclose(f);
        return text;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::size_t RequestTrace::measured_count() const {
    return static_cast<std::size_t>(
        std::count_if(requests.begin(), requests.end(), [](const Request& r) { return !r.pre_horizon; }));
}

const std::string& RequestTrace::ingress_name(std::uint32_t idx) const {
    static const std::string fallback = "cache";
    if (idx < meta.ingress_ids.size()) return meta.ingress_ids[idx];
    return fallback;
}

void RequestTrace::write_csv(const std::string& path) const {
    TextSink sink(path);
    sink.write("time_days,content_id,ingress_id,pre_horizon\n");
    char line[160];
    for (const auto& r : requests) {
        std::snprintf(line, sizeof line, "%.12g,%llu,%s,%d\n", r.time,
                      static_cast<unsigned long long>(r.content_id),
                      ingress_name(r.ingress).c_str(), r.pre_horizon ? 1 : 0);
        sink.write(line);
    }
}

RequestTrace RequestTrace::read_csv(const std::string& path) {
    const std::string text = slurp(path);
    RequestTrace trace;
    std::unordered_map<std::string, std::uint32_t> ingress_index;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace file " + path);
    if (line.rfind("time_days,", 0) != 0)
        throw std::runtime_error("bad trace header in " + path);
    double max_time = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const auto c3 = line.find(',', c2 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos || c3 == std::string::npos)
            throw std::runtime_error("bad trace row: " + line);
        Request r;
        r.time = std::stod(line.substr(0, c1));
        r.content_id = std::stoull(line.substr(c1 + 1, c2 - c1 - 1));
        const std::string ing = line.substr(c2 + 1, c3 - c2 - 1);
        auto [it, inserted] = ingress_index.try_emplace(ing, static_cast<std::uint32_t>(trace.meta.ingress_ids.size()));
        if (inserted) trace.meta.ingress_ids.push_back(ing);
        r.ingress = it->second;
        r.pre_horizon = line[c3 + 1] == '1';
        max_time = std::max(max_time, r.time);
        trace.requests.push_back(r);
    }
    trace.meta.horizon = max_time;
    return trace;
}

void RequestTrace::write_contents_csv(const std::string& path) const {
    TextSink sink(path);
    sink.write("content_id,class_index,tau_days,volume\n");
    std::vector<const ContentInfo*> sorted;
    sorted.reserve(contents.size());
    for (const auto& [id, info] : contents) sorted.push_back(&info);
    std::sort(sorted.begin(), sorted.end(),
              [](const ContentInfo* a, const ContentInfo* b) { return a->id < b->id; });
    char line[128];
    for (const auto* c : sorted) {
        std::snprintf(line, sizeof line, "%llu,%d,%.12g,%.12g\n",
                      static_cast<unsigned long long>(c->id), c->class_index, c->tau, c->volume);
        sink.write(line);
    }
}

void RequestTrace::read_contents_csv(const std::string& path) {
    const std::string text = slurp(path);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ContentInfo c;
        char* end = nullptr;
        c.id = std::strtoull(line.c_str(), &end, 10);
        c.class_index = static_cast<int>(std::strtol(end + 1, &end, 10));
        c.tau = std::strtod(end + 1, &end);
        c.volume = std::strtod(end + 1, &end);
        contents[c.id] = c;
    }
}

}  // namespace snm
