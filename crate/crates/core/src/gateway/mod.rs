//! Chat-model access: providers, retries, rate limiting, and turning model
//! text into typed decisions.

pub mod client;
pub mod extract;
pub mod llm_policy;
pub mod mock;
pub mod parse;

pub use client::{
    ChatRequest, model_from_env, Completion, Gateway, GatewayError, GatewayPolicy, HttpProvider, MockProvider, Provider,
    ProviderError, RateLimiter,
};
pub use extract::{extract_tag, ExtractError};
pub use llm_policy::{LlmFacilitator, LlmPolicy, ModelSettings};
pub use parse::{parse_decision, parse_player_summaries, parse_response, surface, ParseError};
