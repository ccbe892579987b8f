#include "miltag/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "miltag/error.hpp"

namespace miltag {

using nlohmann::json;

std::vector<int> Manifest::label_vector(const ManifestRecord& record) const {
    std::vector<int> v(class_list.size(), 0);
    for (const std::string& label : record.labels) {
        v[class_index(label)] = 1;
    }
    return v;
}

std::size_t Manifest::class_index(const std::string& name) const {
    for (std::size_t i = 0; i < class_list.size(); ++i) {
        if (class_list[i] == name) return i;
    }
    throw Error(Errc::UnknownLabel, "'" + name + "' is not in the class list");
}

const std::vector<ClassInfo>& dcase17_classes() {
    static const std::vector<ClassInfo> classes = {
        {"Car alarm", 273},
        {"Reversing beeps", 337},
        {"Air/Truck horn", 407},
        {"Train horn", 441},
        {"Ambulance siren", 624},
        {"Screaming", 744},
        {"Civil defense siren", 1506},
        {"Police siren", 2399},
        {"Fire engine siren", 2399},
        {"Skateboard", 1617},
        {"Bicycle", 2020},
        {"Train", 2301},
        {"Motorcycle", 3291},
        {"Car passing by", 3724},
        {"Bus", 3745},
        {"Truck", 7090},
        {"Car", 25744},
    };
    return classes;
}

std::vector<std::string> dcase17_class_names() {
    std::vector<std::string> names;
    for (const ClassInfo& c : dcase17_classes()) names.push_back(c.name);
    return names;
}

std::vector<std::size_t> dcase17_class_counts() {
    std::vector<std::size_t> counts;
    for (const ClassInfo& c : dcase17_classes()) counts.push_back(c.sample_count);
    return counts;
}

Manifest parse_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::MalformedLine, "cannot open manifest " + path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    Manifest manifest;
    bool have_class_list = false;
    std::set<std::string> seen_ids;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;

        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(Errc::MalformedLine,
                        path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object()) {
            throw Error(Errc::MalformedLine,
                        path + ":" + std::to_string(line_no) + ": expected a JSON object");
        }

        if (obj.contains("class_list")) {
            if (line_no != 1 || have_class_list) {
                throw Error(Errc::MalformedLine,
                            path + ":" + std::to_string(line_no) +
                                ": class_list is only allowed on the first line");
            }
            manifest.class_list = obj.at("class_list").get<std::vector<std::string>>();
            have_class_list = true;
            continue;
        }

        if (!obj.contains("id") || !obj.contains("path") || !obj.contains("labels")) {
            throw Error(Errc::MalformedLine, path + ":" + std::to_string(line_no) +
                                                 ": record needs id, path and labels");
        }
        if (!have_class_list) {
            manifest.class_list = dcase17_class_names();
            have_class_list = true;
        }

        ManifestRecord record;
        try {
            record.id = obj.at("id").get<std::string>();
            record.path = obj.at("path").get<std::string>();
            record.labels = obj.at("labels").get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            throw Error(Errc::MalformedLine,
                        path + ":" + std::to_string(line_no) + ": " + e.what());
        }

        if (!seen_ids.insert(record.id).second) {
            throw Error(Errc::DuplicateId, path + ":" + std::to_string(line_no) +
                                               ": duplicate clip id '" + record.id + "'");
        }
        for (const std::string& label : record.labels) {
            bool known = false;
            for (const std::string& cls : manifest.class_list) {
                if (cls == label) {
                    known = true;
                    break;
                }
            }
            if (!known) {
                throw Error(Errc::UnknownLabel, path + ":" + std::to_string(line_no) +
                                                    ": unknown label '" + label + "'");
            }
        }

        std::filesystem::path p(record.path);
        if (p.is_relative()) record.path = (base / p).string();
        manifest.records.push_back(std::move(record));
    }

    if (!have_class_list) manifest.class_list = dcase17_class_names();
    return manifest;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(Errc::InvalidConfig, "cannot write " + path);
    out << json{{"class_list", manifest.class_list}}.dump() << "\n";
    for (const ManifestRecord& record : manifest.records) {
        out << json{{"id", record.id}, {"path", record.path}, {"labels", record.labels}}.dump()
            << "\n";
    }
}

} // namespace miltag
