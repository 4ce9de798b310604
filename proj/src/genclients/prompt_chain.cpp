#include "vlad/genclients/prompt_chain.hpp"

#include "vlad/error.hpp"

#include <fstream>
#include <sstream>

#ifndef VLAD_TEMPLATE_DIR
#define VLAD_TEMPLATE_DIR "templates"
#endif

namespace vlad::genclients {

namespace {

std::string read_template(const std::filesystem::path& path, std::string& version) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open template " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    constexpr std::string_view header = "# vlad-template ";
    if (text.rfind(header, 0) == 0) {
        const auto eol = text.find('\n');
        version = text.substr(header.size(), eol - header.size());
        text = eol == std::string::npos ? std::string() : text.substr(eol + 1);
    }
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
        text.pop_back();
    }
    return text;
}

std::string format_mm(double mm) {
    std::ostringstream out;
    out << mm;
    return out.str();
}

StepRecord call_step(GenerationService& service, const RetryPolicy& retry, const ChatStepRequest& request,
                     ChatStepReply& reply) {
    reply = with_retries(retry, [&] { return service.chat_step(request); });
    if (request.modality == Modality::Text && reply.text.empty()) {
        throw Error(ErrorCode::MalformedResponse, "empty text reply at step " + std::to_string(request.step));
    }
    if (request.modality == Modality::Image && !reply.image) {
        throw Error(ErrorCode::MalformedResponse, "image step returned no image");
    }
    return {request.step, request.modality, reply.text, reply.tokens};
}

}  // namespace

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
    PromptTemplates t;
    std::string v0, v1, vc;
    t.t0_constraints = read_template(dir / "t0_constraints.txt", v0);
    t.t1_meta = read_template(dir / "t1_meta.txt", v1);
    t.tc_constraints = read_template(dir / "tc_constraints.txt", vc);
    t.version = v0;
    return t;
}

PromptTemplates PromptTemplates::load_default() { return load(VLAD_TEMPLATE_DIR); }

std::string render_template(const std::string& text, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const auto open = text.find("{{", pos);
        if (open == std::string::npos) {
            out += text.substr(pos);
            break;
        }
        const auto close = text.find("}}", open);
        if (close == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, "unterminated template placeholder");
        }
        const std::string name = text.substr(open + 2, close - open - 2);
        const auto it = values.find(name);
        if (it == values.end()) {
            throw Error(ErrorCode::InvalidArgument, "no value for template placeholder {{" + name + "}}");
        }
        out += text.substr(pos, open - pos);
        out += it->second;
        pos = close + 2;
    }
    return out;
}

std::map<std::string, std::string> GripperSpec::placeholders() const {
    return {{"gripper_kind", kind},
            {"gripper_max_opening_mm", format_mm(max_opening_mm)},
            {"gripper_finger_width_mm", format_mm(finger_width_mm)}};
}

std::string_view to_string(ChainMode mode) { return mode == ChainMode::ThreeStep ? "three-step" : "single-step"; }

GenerationExchange run_prompt_chain(GenerationService& service, const std::string& sample_id,
                                    const RgbImage& scene_image, const BinaryMask& object_mask,
                                    const PromptTemplates& templates, const GripperSpec& gripper, ChainMode mode,
                                    const RetryPolicy& retry) {
    GenerationExchange ex;
    ex.sample_id = sample_id;
    ex.mode = mode;
    ex.provider = service.provider();
    ex.template_version = templates.version;
    ex.input_image = lifting::mask_background(scene_image, object_mask);

    auto values = gripper.placeholders();
    ex.chain.t0_constraints = render_template(templates.t0_constraints, values);
    ex.chain.tc_constraints = render_template(templates.tc_constraints, values);
    ex.chain.inpaint_mask = object_mask.complement();

    ChatStepReply reply;
    int step = 0;
    if (mode == ChainMode::ThreeStep) {
        ChatStepRequest reason{sample_id, step++, Modality::Text, {{"user", ex.chain.t0_constraints}},
                               ex.input_image, std::nullopt};
        ex.steps.push_back(call_step(service, retry, reason, reply));
        ex.chain.reasoning = reply.text;

        values["reasoning"] = ex.chain.reasoning;
        ex.chain.t1_meta = render_template(templates.t1_meta, values);
        ChatStepRequest prompt{sample_id,
                               step++,
                               Modality::Text,
                               {{"user", ex.chain.t0_constraints},
                                {"assistant", ex.chain.reasoning},
                                {"user", ex.chain.t1_meta}},
                               std::nullopt,
                               std::nullopt};
        ex.steps.push_back(call_step(service, retry, prompt, reply));
        ex.chain.t2_generated = reply.text;
    } else {
        ex.chain.t2_generated = ex.chain.t0_constraints;
    }

    ChatStepRequest image{sample_id,
                          step,
                          Modality::Image,
                          {{"user", ex.chain.t2_generated + "\n\n" + ex.chain.tc_constraints}},
                          ex.input_image,
                          ex.chain.inpaint_mask};
    ex.steps.push_back(call_step(service, retry, image, reply));
    ex.output_image = *reply.image;
    if (ex.output_image.width() != scene_image.width() || ex.output_image.height() != scene_image.height()) {
        throw Error(ErrorCode::MalformedResponse, "generated image size differs from the input image");
    }

    for (const auto& s : ex.steps) {
        ex.token_counts.output += s.tokens.output;
        ex.token_counts.reasoning += s.tokens.reasoning;
    }
    return ex;
}

nlohmann::json chain_to_json(const GenerationExchange& ex) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : ex.steps) {
        steps.push_back({{"step", s.step},
                         {"modality", s.modality == Modality::Text ? "text" : "image"},
                         {"text", s.text},
                         {"tokens", {{"output", s.tokens.output}, {"reasoning", s.tokens.reasoning}}}});
    }
    return {{"schema", "vlad.fixture/1"},
            {"sample_id", ex.sample_id},
            {"provider", ex.provider},
            {"mode", std::string(to_string(ex.mode))},
            {"template_version", ex.template_version},
            {"chain",
             {{"t0_constraints", ex.chain.t0_constraints},
              {"reasoning", ex.chain.reasoning},
              {"t1_meta", ex.chain.t1_meta},
              {"t2_generated", ex.chain.t2_generated},
              {"tc_constraints", ex.chain.tc_constraints}}},
            {"steps", steps},
            {"token_counts", {{"output", ex.token_counts.output}, {"reasoning", ex.token_counts.reasoning}}}};
}

std::vector<StepRecord> steps_from_json(const nlohmann::json& chain_json) {
    std::vector<StepRecord> steps;
    try {
        for (const auto& s : chain_json.at("steps")) {
            StepRecord r;
            r.step = s.at("step").get<int>();
            r.modality = s.at("modality").get<std::string>() == "image" ? Modality::Image : Modality::Text;
            r.text = s.value("text", std::string());
            if (s.contains("tokens")) {
                r.tokens.output = s.at("tokens").value("output", std::size_t{0});
                r.tokens.reasoning = s.at("tokens").value("reasoning", std::size_t{0});
            }
            steps.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedResponse, std::string("chain.json: ") + e.what());
    }
    return steps;
}

}  // namespace vlad::genclients
