//! Opt-in, line-delimited trace stream for the solver pipeline. One record
//! per structural event so tests and tools can assert on pipeline shape
//! without parsing prose.

/// A trace sink. When absent, tracing costs one branch per event.
pub struct Tracer<'a> {
    sink: Option<&'a mut dyn FnMut(&str)>,
}

impl<'a> Tracer<'a> {
    pub fn none() -> Tracer<'static> {
        Tracer { sink: None }
    }

    pub fn new(sink: &'a mut dyn FnMut(&str)) -> Tracer<'a> {
        Tracer { sink: Some(sink) }
    }

    pub fn enabled(&self) -> bool {
        self.sink.is_some()
    }

    /// Emit one `stage=... key=value ...` record.
    pub fn emit(&mut self, stage: &str, fields: std::fmt::Arguments<'_>) {
        if let Some(sink) = self.sink.as_mut() {
            sink(&format!("stage={stage} {fields}"));
        }
    }
}

#[macro_export]
macro_rules! trace_event {
    ($tracer:expr, $stage:expr, $($arg:tt)*) => {
        if $tracer.enabled() {
            $tracer.emit($stage, format_args!($($arg)*));
        }
    };
}
