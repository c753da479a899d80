"""Optional chat-completions server over a fine-tuned checkpoint.

Implements just enough of the wire protocol for the upstream pipeline's
remote actor backend: POST /chat/completions with {model, messages,
temperature} returns the first choice's message content.

No ``from __future__ import annotations`` here: the request model is a
closure-local class, and stringified annotations would be unresolvable for
the route's signature inspection.
"""

import torch

from .convert import AdapterError
from .model import TinyCausalLM, load_model
from .tokenizer import Vocab, tokenize_with_offsets


def generate_text(model: TinyCausalLM, vocab: Vocab, prompt: str,
                  temperature: float = 0.0, max_new_tokens: int = 48,
                  seed: int = 0) -> str:
    ids = [vocab.bos_id] + [vocab.encode(t.text) for t in tokenize_with_offsets(prompt)]
    ids = ids[-model.config.max_len:]
    generator = torch.Generator().manual_seed(seed)
    out: list[int] = []
    with torch.no_grad():
        for _ in range(max_new_tokens):
            window = torch.tensor([ids[-model.config.max_len:]], dtype=torch.long)
            logits = model(window)[0, -1]
            if temperature <= 1e-9:
                next_id = int(logits.argmax())
            else:
                probs = torch.softmax(logits / temperature, dim=-1)
                next_id = int(torch.multinomial(probs, 1, generator=generator))
            ids.append(next_id)
            out.append(next_id)
    return "".join(vocab.id_to_token[i] for i in out)


def create_app(checkpoint_dir: str):
    try:
        from fastapi import FastAPI
        from pydantic import BaseModel
    except ImportError as exc:
        raise AdapterError(
            "serving requires the 'serve' extra (pip install 'sft-adapter[serve]')"
        ) from exc

    model, vocab = load_model(checkpoint_dir)
    app = FastAPI(title="sft-adapter")

    class ChatRequest(BaseModel):
        model: str = ""
        messages: list[dict]
        temperature: float = 0.0
        max_tokens: int = 48

    @app.post("/chat/completions")
    def chat_completions(request: ChatRequest):
        user_turns = [m.get("content", "") for m in request.messages
                      if m.get("role") == "user"]
        prompt = user_turns[-1] if user_turns else ""
        content = generate_text(model, vocab, prompt,
                                temperature=request.temperature,
                                max_new_tokens=request.max_tokens)
        return {
            "object": "chat.completion",
            "model": request.model or "sft-adapter",
            "choices": [{
                "index": 0,
                "message": {"role": "assistant", "content": content},
                "finish_reason": "length",
            }],
        }

    return app
