//! Built-in offline answers, chosen by reading the prompt's task section.

use crate::game::Role;

fn number_after(text: &str, marker: &str) -> Option<u32> {
    let at = text.find(marker)? + marker.len();
    let digits: String = text[at..].chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

fn word_after(text: &str, marker: &str) -> Option<String> {
    let at = text.find(marker)? + marker.len();
    text[at..].split_whitespace().next().map(str::to_string)
}

/// A well-formed reply for whichever phase `prompt` asks about.
pub fn builtin_reply(prompt: &str) -> String {
    let task = prompt.rfind("Task:").map(|i| &prompt[i..]).unwrap_or(prompt);
    if task.contains("<PLAYER>") {
        return Role::ALL
            .iter()
            .map(|r| format!("<{r}> I will keep the Port healthy and work on my goal. </{r}>"))
            .collect::<Vec<_>>()
            .join("\n");
    }
    if task.contains("generate a conversation") {
        return Role::ALL
            .iter()
            .map(|r| format!("**{r}:** Let us keep the Port healthy this round."))
            .collect::<Vec<_>>()
            .join("\n");
    }
    if task.contains("<EVENT>") {
        return "I pick the first option. <EVENT>1</EVENT>".to_string();
    }
    if task.contains("<HEALTH>") {
        let coins = number_after(task, "You can spend up to ").unwrap_or(0).min(5);
        return format!("A steady contribution. <HEALTH>{coins}</HEALTH>");
    }
    if task.contains("<GOAL>") {
        if task.contains("Acceptable values are Same") {
            return "I stay the course. <GOAL>Same</GOAL>".to_string();
        }
        let goal = prompt
            .find("Goals to pick from: ")
            .map(|i| &prompt[i + "Goals to pick from: ".len()..])
            .and_then(|rest| rest.split(" (").next())
            .unwrap_or("none")
            .trim()
            .to_string();
        return format!("This looks achievable. <GOAL>{goal}</GOAL>");
    }
    if task.contains("<RESOURCE>") {
        let qty = number_after(task, "purchase at most ").unwrap_or(0);
        let marker = format!("purchase at most {qty} ");
        let kind = word_after(task, &marker).unwrap_or_default();
        return if qty == 0 || kind.is_empty() {
            "Nothing to buy. <RESOURCE>None</RESOURCE>".to_string()
        } else {
            format!("My speciality is cheapest. <RESOURCE>{qty} {kind}</RESOURCE>")
        };
    }
    if task.contains("<TRADE>") {
        return "No trade this round. <TRADE>Offer: None, Receive: None</TRADE>".to_string();
    }
    if task.contains("<ACCEPT>") {
        return "I would rather keep my resources. <ACCEPT>No</ACCEPT>".to_string();
    }
    if task.contains("<DISCARD>") {
        return "I keep my goals. <DISCARD>None</DISCARD>".to_string();
    }
    "I have nothing to say.".to_string()
}
