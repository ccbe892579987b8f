#include "miltag/embed.hpp"

#include "miltag/error.hpp"

namespace miltag {

std::vector<LayerSpec> embedding_model_spec(std::size_t input_dim,
                                            const EmbeddingModelConfig& cfg,
                                            std::size_t n_classes) {
    std::vector<LayerSpec> specs;
    if (!cfg.backbone.empty()) {
        const auto out = chain_output_shape(cfg.backbone, {input_dim});
        if (out.size() != 1 || out[0] != cfg.embed_dim) {
            throw Error(Errc::IncompatibleDims,
                        "backbone ends with " + shape_str(out) + ", embed_dim is " +
                            std::to_string(cfg.embed_dim));
        }
        specs = cfg.backbone;
    } else {
        std::size_t width = input_dim;
        for (std::size_t h : cfg.hidden) {
            specs.push_back(LayerSpec::dense(width, h));
            specs.push_back(LayerSpec::relu());
            width = h;
        }
        specs.push_back(LayerSpec::dense(width, cfg.embed_dim));
        specs.push_back(LayerSpec::relu());
    }
    specs.push_back(LayerSpec::dense(cfg.embed_dim, n_classes));
    return specs;
}

std::vector<Bag> instance_level_bags(const std::vector<Bag>& clip_bags) {
    std::vector<Bag> out;
    for (const Bag& clip : clip_bags) {
        for (std::size_t j = 0; j < clip.instances.size(); ++j) {
            Bag b;
            b.id = clip.id + "#" + std::to_string(j);
            b.instances.push_back(clip.instances[j]);
            b.labels = clip.labels;
            out.push_back(std::move(b));
        }
    }
    return out;
}

TrainResult train_embedding_model(const std::vector<Bag>& train_clips,
                                  const std::vector<Bag>& val_clips,
                                  const EmbeddingModelConfig& cfg, TrainConfig train_cfg) {
    if (train_clips.empty() || val_clips.empty()) {
        throw Error(Errc::EmptyDataset, "embedding training needs train and validation clips");
    }
    const std::size_t input_dim = train_clips[0].instances.at(0).size();
    const std::size_t n_classes = train_clips[0].labels.size();

    const std::vector<LayerSpec> specs = embedding_model_spec(input_dim, cfg, n_classes);
    const Model init = build_model(specs, {input_dim}, train_cfg.seed);

    // frame-wise targets, clip-level max-pooled selection
    train_cfg.selection_pooling = Pooling::Max;
    return train(init, instance_level_bags(train_clips), val_clips, train_cfg);
}

EmbeddingSet extract_embeddings(const Model& model, const std::vector<Bag>& clip_bags) {
    EmbeddingSet set;
    set.source = EmbeddingSource::Trained;
    for (const Bag& clip : clip_bags) {
        ClipEmbeddings entry;
        entry.id = clip.id;
        for (const Tensor& inst : clip.instances) {
            const std::vector<double> vec = penultimate(model, inst);
            if (set.dim == 0) set.dim = static_cast<std::uint32_t>(vec.size());
            entry.vectors.emplace_back(vec.begin(), vec.end());
        }
        set.clips.push_back(std::move(entry));
    }
    return set;
}

EmbeddingSet ingest_external(const std::string& path) {
    EmbeddingSet set = read_embeddings(path);
    set.source = EmbeddingSource::External;
    return set;
}

std::vector<Bag> bags_from_embeddings(const EmbeddingSet& set, const Manifest& manifest) {
    std::string missing;
    std::vector<Bag> bags;
    bags.reserve(manifest.records.size());
    for (const ManifestRecord& record : manifest.records) {
        const ClipEmbeddings* clip = set.find(record.id);
        if (clip == nullptr) {
            if (!missing.empty()) missing += ", ";
            missing += record.id;
            continue;
        }
        Bag bag;
        bag.id = record.id;
        bag.labels = manifest.label_vector(record);
        for (const std::vector<float>& vec : clip->vectors) {
            Tensor t({vec.size()});
            for (std::size_t i = 0; i < vec.size(); ++i) t[i] = vec[i];
            bag.instances.push_back(std::move(t));
        }
        bags.push_back(std::move(bag));
    }
    if (!missing.empty()) {
        throw Error(Errc::MissingClip, "embedding set is missing clips: " + missing);
    }
    return bags;
}

} // namespace miltag
