use futures::future::join_all;
use tokio::sync::Mutex;

use crate::llm::{ChatModel, CompletionRequest};
use crate::prompts::{format_passages, render, Bindings, Registry, TemplateId};
use crate::retrieval::{InvertedIndex, ScoredPassage};

use super::{
    Aborted, AgentResponse, AgentRole, Clock, GlobalMessagePool, LlmCall, Method, PipelineConfig, PipelineError,
    PoolPolicy, QuestionTrace, RerankOutcome,
};

/// Runs one configured method over questions.
///
/// With [`PoolPolicy::CarryAcrossQuestions`] the pipeline owns the shared
/// pool and questions run one at a time; with the default fresh policy
/// questions are independent and may run concurrently.
pub struct Pipeline<'a> {
    config: PipelineConfig,
    llm: &'a dyn ChatModel,
    index: Option<&'a InvertedIndex>,
    registry: &'a Registry,
    clock: Clock,
    carried: Mutex<GlobalMessagePool>,
}

impl<'a> Pipeline<'a> {
    pub fn new(config: PipelineConfig, llm: &'a dyn ChatModel) -> Self {
        let carried = Mutex::new(seed_pool(&config));
        Self {
            config,
            llm,
            index: None,
            registry: Registry::builtin(),
            clock: Clock::Wall,
            carried,
        }
    }

    pub fn with_index(mut self, index: &'a InvertedIndex) -> Self {
        self.index = Some(index);
        self
    }

    pub fn with_registry(mut self, registry: &'a Registry) -> Self {
        self.registry = registry;
        self
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Current state of the carried pool (the seed pool under the fresh policy).
    pub async fn carried_pool(&self) -> GlobalMessagePool {
        self.carried.lock().await.clone()
    }

    /// Runs the configured method on one question, applying the pool policy.
    pub async fn run_question(&self, id: &str, question: &str) -> Result<QuestionTrace, Aborted> {
        if self.config.method != Method::PersonaRag {
            return self.run_baseline(id, question).await;
        }
        match self.config.pool_policy {
            PoolPolicy::FreshPerQuestion => {
                let mut pool = seed_pool(&self.config);
                self.run_personarag(id, question, &mut pool).await
            }
            PoolPolicy::CarryAcrossQuestions => {
                let mut pool = self.carried.lock().await;
                self.run_personarag(id, question, &mut pool).await
            }
        }
    }

    async fn call(&self, template: TemplateId, bindings: &Bindings) -> Result<LlmCall, PipelineError> {
        let prompt = render(self.registry.template(template), bindings)?;
        let request = CompletionRequest::single_prompt(self.config.model.clone(), prompt.clone())
            .with_temperature(self.config.temperature)
            .with_max_tokens(self.config.max_tokens);
        let result = self.llm.complete(&request).await.map_err(|source| PipelineError::Llm {
            template: template.as_str().to_string(),
            source,
        })?;
        Ok(LlmCall {
            template: template.as_str().to_string(),
            prompt,
            response: result.text,
        })
    }

    pub fn retrieve(&self, question: &str) -> Result<Vec<ScoredPassage<f64>>, PipelineError> {
        let index = self.index.ok_or(PipelineError::MissingIndex(self.config.method))?;
        Ok(index.search(question, self.config.top_k)?)
    }

    /// Chain-of-thought pass over the retrieved passages; the reply is the
    /// initial answer that the cognitive agent later revises.
    pub async fn run_cot(&self, question: &str, passages: &[ScoredPassage<f64>]) -> Result<LlmCall, PipelineError> {
        let b = Bindings::new()
            .with("question", question)
            .with("passages", format_passages(passages));
        self.call(TemplateId::ChainOfThought, &b).await
    }

    pub async fn run_agent(
        &self,
        role: AgentRole,
        question: &str,
        passages: &str,
        global_memory: &str,
    ) -> Result<(AgentResponse, LlmCall), PipelineError> {
        let timer = self.clock.start();
        let b = Bindings::new()
            .with("question", question)
            .with("passages", passages)
            .with("global_memory", global_memory);
        let call = self.call(role.template(), &b).await?;
        let response = AgentResponse {
            role,
            text: call.response.clone(),
            elapsed: timer.elapsed(),
        };
        Ok((response, call))
    }

    /// Rewrites the pool from the five agent responses.
    pub async fn consolidate_pool(
        &self,
        question: &str,
        responses: &[AgentResponse],
        pool: &mut GlobalMessagePool,
    ) -> Result<LlmCall, PipelineError> {
        check_coverage(responses)?;
        let b = Bindings::new()
            .with("question", question)
            .with("agent_responses", format_agent_responses(responses))
            .with("global_memory", pool.content());
        let call = self.call(TemplateId::GlobalMessagePool, &b).await?;
        pool.consolidate(call.response.clone());
        Ok(call)
    }

    pub async fn run_cognitive_adaptation(
        &self,
        question: &str,
        cot_answer: &str,
        responses: &[AgentResponse],
    ) -> Result<LlmCall, PipelineError> {
        check_coverage(responses)?;
        let mut b = Bindings::new().with("question", question).with("cot_answer", cot_answer);
        for r in responses {
            b.set(r.role.answer_slot(), r.text.clone());
        }
        self.call(TemplateId::CognitiveAgent, &b).await
    }

    /// Retrieval, chain of thought, agent fan-out, pool consolidation and
    /// cognitive adaptation for one question against `pool`.
    pub async fn run_personarag(
        &self,
        id: &str,
        question: &str,
        pool: &mut GlobalMessagePool,
    ) -> Result<QuestionTrace, Aborted> {
        let mut trace = QuestionTrace::new(id, question, Method::PersonaRag, self.config.top_k);
        if self.config.method != Method::PersonaRag {
            return Err(abort(trace, PipelineError::WrongMethod(self.config.method)));
        }
        let total = self.clock.start();
        let outcome = self.personarag_steps(&mut trace, pool).await;
        self.finish(trace, total.elapsed(), outcome)
    }

    async fn personarag_steps(
        &self,
        trace: &mut QuestionTrace,
        pool: &mut GlobalMessagePool,
    ) -> Result<(), PipelineError> {
        let question = trace.question.clone();
        trace.pool_before = Some(pool.content().to_string());
        trace.pool_revision = Some(pool.revision());

        let timer = self.clock.start();
        trace.passages = self.retrieve(&question)?;
        trace.timings.retrieval = timer.elapsed();
        let passages = format_passages(&trace.passages);

        let cot = self.run_cot(&question, &trace.passages).await?;
        let cot_answer = cot.response.clone();
        trace.cot_answer = Some(cot_answer.clone());
        trace.llm_calls.push(cot);

        // Every agent reads the same snapshot; results are recorded in
        // canonical role order whatever order they complete in.
        let snapshot = pool.content().to_string();
        let results = join_all(
            AgentRole::ALL
                .iter()
                .map(|&role| self.run_agent(role, &question, &passages, &snapshot)),
        )
        .await;
        let mut failure = None;
        for result in results {
            match result {
                Ok((response, call)) => {
                    trace.agent_responses.push(response);
                    trace.llm_calls.push(call);
                }
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        if let Some(e) = failure {
            return Err(e);
        }

        let call = self.consolidate_pool(&question, &trace.agent_responses, pool).await?;
        trace.llm_calls.push(call);
        trace.pool_after = Some(pool.content().to_string());
        trace.pool_revision = Some(pool.revision());

        let call = self
            .run_cognitive_adaptation(&question, &cot_answer, &trace.agent_responses)
            .await?;
        trace.final_answer = call.response.clone();
        trace.llm_calls.push(call);
        Ok(())
    }

    pub async fn run_baseline(&self, id: &str, question: &str) -> Result<QuestionTrace, Aborted> {
        let method = self.config.method;
        let mut trace = QuestionTrace::new(id, question, method, self.config.top_k);
        if method == Method::PersonaRag {
            return Err(abort(trace, PipelineError::WrongMethod(method)));
        }
        let total = self.clock.start();
        let outcome = self.baseline_steps(&mut trace).await;
        self.finish(trace, total.elapsed(), outcome)
    }

    async fn baseline_steps(&self, trace: &mut QuestionTrace) -> Result<(), PipelineError> {
        let question = trace.question.clone();
        let method = trace.method;
        if method.uses_retrieval() {
            let timer = self.clock.start();
            trace.passages = self.retrieve(&question)?;
            trace.timings.retrieval = timer.elapsed();
        }
        let with_passages = |passages: &[ScoredPassage<f64>]| {
            Bindings::new()
                .with("question", question.as_str())
                .with("passages", format_passages(passages))
        };
        let answer = match method {
            Method::NoRag => {
                self.call(TemplateId::VanillaQa, &Bindings::new().with("question", question.as_str()))
                    .await?
            }
            Method::Guideline => {
                let steps = self
                    .call(TemplateId::Guideline, &Bindings::new().with("question", question.as_str()))
                    .await?;
                let b = Bindings::new()
                    .with("question", question.as_str())
                    .with("guideline", steps.response.as_str());
                trace.llm_calls.push(steps);
                self.call(TemplateId::GuidelineAnswer, &b).await?
            }
            Method::VanillaRag => self.call(TemplateId::VanillaRag, &with_passages(&trace.passages)).await?,
            Method::CotPassage => self.call(TemplateId::CotPassage, &with_passages(&trace.passages)).await?,
            Method::ChainOfNote => {
                self.call(TemplateId::ChainOfThought, &with_passages(&trace.passages))
                    .await?
            }
            Method::SelfRerank => {
                let filter = self.call(TemplateId::SelfRerank, &with_passages(&trace.passages)).await?;
                let selection = parse_passage_selection(&filter.response, trace.passages.len());
                trace.llm_calls.push(filter);
                let kept: Vec<ScoredPassage<f64>> = match &selection {
                    Some(picks) => picks.iter().map(|&i| trace.passages[i].clone()).collect(),
                    None => trace.passages.clone(),
                };
                trace.rerank = Some(RerankOutcome {
                    kept: kept.iter().map(|p| p.doc_id.clone()).collect(),
                    fallback: selection.is_none(),
                });
                self.call(TemplateId::VanillaRag, &with_passages(&kept)).await?
            }
            Method::PersonaRag => unreachable!("handled by run_personarag"),
        };
        trace.final_answer = answer.response.clone();
        trace.llm_calls.push(answer);
        Ok(())
    }

    fn finish(
        &self,
        mut trace: QuestionTrace,
        total: std::time::Duration,
        outcome: Result<(), PipelineError>,
    ) -> Result<QuestionTrace, Aborted> {
        trace.timings.total = total;
        trace.timings.generation = total.saturating_sub(trace.timings.retrieval);
        match outcome {
            Ok(()) => Ok(trace),
            Err(error) => Err(abort(trace, error)),
        }
    }
}

fn seed_pool(config: &PipelineConfig) -> GlobalMessagePool {
    GlobalMessagePool::seeded(config.persona_seed.clone().unwrap_or_default())
}

fn abort(mut trace: QuestionTrace, error: PipelineError) -> Aborted {
    trace.error = Some(error.to_string());
    Aborted {
        trace: Box::new(trace),
        error,
    }
}

fn check_coverage(responses: &[AgentResponse]) -> Result<(), PipelineError> {
    let roles: Vec<AgentRole> = responses.iter().map(|r| r.role).collect();
    if roles != AgentRole::ALL {
        return Err(PipelineError::AgentCoverage {
            expected: AgentRole::ALL.len(),
            got: responses.len(),
        });
    }
    Ok(())
}

/// `Label: text` blocks, one per agent, separated by blank lines.
pub fn format_agent_responses(responses: &[AgentResponse]) -> String {
    responses
        .iter()
        .map(|r| format!("{}: {}", r.role.label(), r.text))
        .collect::<Vec<_>>()
        .join("\n\n")
}

/// Parses a filter reply such as `"1, 3"` into 0-based passage indices.
/// Returns `None` for anything other than a non-empty comma-separated list of
/// in-range passage numbers. Repeats are dropped, first occurrence wins.
pub fn parse_passage_selection(reply: &str, passage_count: usize) -> Option<Vec<usize>> {
    let body = reply.trim().trim_end_matches('.');
    if body.is_empty() {
        return None;
    }
    let mut picks = Vec::new();
    for part in body.split(',') {
        let n: usize = part.trim().parse().ok()?;
        if n == 0 || n > passage_count {
            return None;
        }
        if !picks.contains(&(n - 1)) {
            picks.push(n - 1);
        }
    }
    Some(picks)
}
