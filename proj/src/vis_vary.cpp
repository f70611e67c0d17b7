#include "parc/vis_vary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "parc/pixel_kernels.hpp"

namespace parc {

ImageBuffer ImageBuffer::filled(int width, int height, std::uint8_t r, std::uint8_t g,
                                std::uint8_t b) {
    if (width < 1 || height < 1) throw Error("image dimensions must be >= 1");
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = r;
        img.pixels[i + 1] = g;
        img.pixels[i + 2] = b;
    }
    return img;
}

namespace {

// Discrete Gaussian taps, radius ceil(3*sigma), normalized in double then
// narrowed to float so every backend consumes the same tap values.
std::vector<float> gaussian_taps(double sigma, int radius) {
    std::vector<double> weights(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        double w = std::exp(-(static_cast<double>(k) * k) / (2.0 * sigma * sigma));
        weights[static_cast<std::size_t>(k + radius)] = w;
        total += w;
    }
    std::vector<float> taps(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        taps[i] = static_cast<float>(weights[i] / total);
    return taps;
}

}  // namespace

ImageBuffer blur(const ImageBuffer& img, double sigma) {
    if (!(sigma > 0.0)) throw Error("blur: sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const std::vector<float> taps = gaussian_taps(sigma, radius);
    const auto& ops = kernels::active_kernels();

    const std::size_t plane_size = static_cast<std::size_t>(img.width) * img.height;
    std::vector<float> plane(plane_size);
    std::vector<float> tmp(plane_size);
    ImageBuffer out = img;
    std::vector<std::uint8_t> channel(plane_size);

    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < plane_size; ++i)
            plane[i] = static_cast<float>(img.pixels[i * 3 + c]);
        ops.conv_rows_f32(plane.data(), tmp.data(), img.width, img.height, taps.data(), radius);
        ops.conv_cols_f32(tmp.data(), plane.data(), img.width, img.height, taps.data(), radius);
        ops.round_clamp_f32_to_u8(plane.data(), channel.data(), plane_size);
        for (std::size_t i = 0; i < plane_size; ++i) out.pixels[i * 3 + c] = channel[i];
    }
    return out;
}

ImageBuffer brighten(const ImageBuffer& img, double factor) {
    if (!(factor > 0.0)) throw Error("brighten: factor must be > 0");
    ImageBuffer out = img;
    kernels::active_kernels().scale_round_clamp_u8(img.pixels.data(), out.pixels.data(),
                                                   img.pixels.size(),
                                                   static_cast<float>(factor));
    return out;
}

ImageBuffer rotate90(const ImageBuffer& img) {
    ImageBuffer out;
    out.width = img.height;
    out.height = img.width;
    out.pixels.resize(img.pixels.size());
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const std::uint8_t* src = img.at(y, img.height - 1 - x);
            std::uint8_t* dst = out.at(x, y);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
        }
    }
    return out;
}

ImageBuffer compose_side_by_side(const ImageBuffer& left, const ImageBuffer& right) {
    const int gutter = 8;
    ImageBuffer out = ImageBuffer::filled(left.width + gutter + right.width,
                                          std::max(left.height, right.height), 255, 255, 255);
    for (int y = 0; y < left.height; ++y) {
        std::copy_n(left.at(0, y), static_cast<std::size_t>(left.width) * 3, out.at(0, y));
    }
    for (int y = 0; y < right.height; ++y) {
        std::copy_n(right.at(0, y), static_cast<std::size_t>(right.width) * 3,
                    out.at(left.width + gutter, y));
    }
    return out;
}

namespace {

struct ComparativeView {
    const ImageSlot* left;
    const ImageSlot* right;
    char correct_letter;
};

ComparativeView comparative_view(const Prompt& prompt) {
    if (prompt.images.size() != 2)
        throw Error("prompt '" + prompt.id + "' is not a two-image comparative prompt");
    if (prompt.options.size() != 2 || prompt.options.texts()[0] != "Left" ||
        prompt.options.texts()[1] != "Right")
        throw Error("prompt '" + prompt.id + "' needs options Left/Right");
    if (prompt.answer_key.correct.size() != 1)
        throw Error("prompt '" + prompt.id + "' needs exactly one correct answer");
    ComparativeView view{nullptr, nullptr, prompt.answer_key.correct.letters()[0]};
    for (const ImageSlot& slot : prompt.images) {
        if (slot.role == ImageRole::left) view.left = &slot;
        if (slot.role == ImageRole::right) view.right = &slot;
    }
    if (view.left == nullptr || view.right == nullptr)
        throw Error("prompt '" + prompt.id + "' needs left and right image roles");
    return view;
}

char flipped(char letter) { return letter == 'A' ? 'B' : 'A'; }

}  // namespace

Prompt swap_images(const Prompt& prompt) {
    ComparativeView view = comparative_view(prompt);
    Prompt out = prompt;
    out.id = prompt.id + "::VS-S";
    out.parent_id = prompt.id;
    out.variation = VariationTag::VS_S;
    ImageSlot new_left = *view.right;
    new_left.role = ImageRole::left;
    ImageSlot new_right = *view.left;
    new_right.role = ImageRole::right;
    out.images = {new_left, new_right};
    out.answer_key.correct = LetterSet({flipped(view.correct_letter)});
    out.answer_key.original_correct = prompt.answer_key.correct;
    return out;
}

std::vector<ExchangeAnnotation> load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open annotation file: " + path.string());
    std::vector<ExchangeAnnotation> annotations;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            ExchangeAnnotation ann;
            ann.question_text = j.at("question_text").get<std::string>();
            ann.loser_image = j.at("loser_image").get<std::string>();
            for (const auto& b : j.at("beats")) ann.beats.push_back(b.get<std::string>());
            for (const std::string& b : ann.beats) {
                if (b == ann.loser_image)
                    throw Error("image '" + b + "' cannot beat itself");
            }
            annotations.push_back(std::move(ann));
        } catch (const nlohmann::json::exception& e) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": malformed line: " +
                        e.what());
        }
    }
    return annotations;
}

DatasetHandle exchange_filter(const DatasetHandle& dataset,
                              std::span<const ExchangeAnnotation> annotations) {
    if (dataset.style != DatasetStyle::comparative_two_image)
        throw Error("exchange filter needs a comparative two-image dataset");

    // Step 1: instances per unique question text.
    std::map<std::string, std::vector<const Prompt*>> by_question;
    for (const Prompt& p : dataset.prompts) by_question[p.question].push_back(&p);

    // Step 2: the losing images of every question group.
    std::map<std::string, std::set<std::string>> losers_by_question;
    auto loser_of = [](const Prompt& p) {
        ComparativeView view = comparative_view(p);
        return view.correct_letter == 'A' ? view.right->path : view.left->path;
    };
    for (const auto& [question, prompts] : by_question) {
        for (const Prompt* p : prompts) losers_by_question[question].insert(loser_of(*p));
    }

    // Step 3: beats sets, validated against the losers of their question.
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> beats_index;
    for (const ExchangeAnnotation& ann : annotations) {
        auto it = losers_by_question.find(ann.question_text);
        if (it == losers_by_question.end())
            throw Error("annotation references unknown question text '" + ann.question_text + "'");
        if (it->second.count(ann.loser_image) == 0)
            throw Error("annotation references unknown image '" + ann.loser_image +
                        "' (not a losing image of its question)");
        for (const std::string& b : ann.beats) {
            if (it->second.count(b) == 0)
                throw Error("annotation references unknown image '" + b +
                            "' (not a losing image of its question)");
        }
        std::vector<std::string> beats = ann.beats;
        std::sort(beats.begin(), beats.end());
        auto& slot = beats_index[{ann.question_text, ann.loser_image}];
        slot.insert(slot.end(), beats.begin(), beats.end());
        std::sort(slot.begin(), slot.end());
        slot.erase(std::unique(slot.begin(), slot.end()), slot.end());
    }

    // Step 4: exchange the winner or discard, in stable input order.
    DatasetHandle out;
    out.dataset_id = dataset.dataset_id;
    out.style = dataset.style;
    for (const Prompt& p : dataset.prompts) {
        if (by_question[p.question].size() < 2) continue;  // singleton question
        ComparativeView view = comparative_view(p);
        const ImageSlot* winner = view.correct_letter == 'A' ? view.left : view.right;
        const ImageSlot* loser = view.correct_letter == 'A' ? view.right : view.left;

        auto it = beats_index.find({p.question, loser->path});
        if (it == beats_index.end()) continue;  // loser has no annotated exchange
        const std::string* exchange = nullptr;
        for (const std::string& candidate : it->second) {
            if (candidate != winner->path) {
                exchange = &candidate;
                break;
            }
        }
        if (exchange == nullptr) continue;

        Prompt varied = p;
        varied.id = p.id + "::VS-E";
        varied.parent_id = p.id;
        varied.variation = VariationTag::VS_E;
        for (ImageSlot& slot : varied.images) {
            if (slot.role == winner->role) {
                slot.path = *exchange;
                slot.width = 0;
                slot.height = 0;
            }
        }
        varied.answer_key.correct = LetterSet({flipped(view.correct_letter)});
        varied.answer_key.original_correct = p.answer_key.correct;
        out.prompts.push_back(std::move(varied));
    }
    return out;
}

}  // namespace parc
